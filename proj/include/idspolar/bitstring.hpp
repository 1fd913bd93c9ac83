#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace idspolar {

using Bit = std::uint8_t;

/// Finite binary string. The default-constructed value is the empty string.
class BitString {
public:
    BitString() = default;
    explicit BitString(std::vector<Bit> bits);
    BitString(std::span<const Bit> bits) : bits_(bits.begin(), bits.end()) {}

    static BitString repeat(Bit b, std::size_t count);
    static BitString zeros(std::size_t count) { return repeat(0, count); }
    static BitString ones(std::size_t count) { return repeat(1, count); }
    /// Parses a string of '0'/'1' characters; throws std::invalid_argument otherwise.
    static BitString parse(std::string_view text);
    /// Bit t of `index` becomes position t.
    static BitString from_index(std::uint64_t index, std::size_t length);

    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }
    Bit operator[](std::size_t i) const noexcept { return bits_[i]; }
    std::span<const Bit> view() const noexcept { return bits_; }
    auto begin() const noexcept { return bits_.begin(); }
    auto end() const noexcept { return bits_.end(); }

    void push_back(Bit b) { bits_.push_back(b); }
    void append(const BitString& other);
    void append(std::span<const Bit> other);
    void prepend(const BitString& other);

    /// Half-open slice [first, last).
    BitString slice(std::size_t first, std::size_t last) const;
    BitString suffix_from(std::size_t first) const;
    BitString prefix(std::size_t count) const { return slice(0, count); }
    BitString reversed() const;

    std::size_t count_zeros() const noexcept;
    std::size_t count_ones() const noexcept { return size() - count_zeros(); }

    std::uint64_t to_index() const;
    std::string to_string() const;

    friend auto operator<=>(const BitString&, const BitString&) = default;
    friend bool operator==(const BitString&, const BitString&) = default;

private:
    std::vector<Bit> bits_;
};

/// Concatenation.
BitString operator+(BitString lhs, const BitString& rhs);

std::size_t count_zeros(std::span<const Bit> bits) noexcept;

struct BitStringHash {
    std::size_t operator()(const BitString& s) const noexcept;
};

}  // namespace idspolar

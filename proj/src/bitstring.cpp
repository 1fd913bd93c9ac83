#include "idspolar/bitstring.hpp"

#include <algorithm>
#include <stdexcept>

namespace idspolar {

BitString::BitString(std::vector<Bit> bits) : bits_(std::move(bits)) {
    for (Bit& b : bits_) b = b ? 1 : 0;
}

BitString BitString::repeat(Bit b, std::size_t count) {
    BitString s;
    s.bits_.assign(count, b ? 1 : 0);
    return s;
}

BitString BitString::parse(std::string_view text) {
    BitString s;
    s.bits_.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1')
            throw std::invalid_argument("bit string may only contain '0' and '1': " + std::string(text));
        s.bits_.push_back(c == '1');
    }
    return s;
}

BitString BitString::from_index(std::uint64_t index, std::size_t length) {
    if (length > 64) throw std::invalid_argument("from_index supports at most 64 bits");
    BitString s;
    s.bits_.resize(length);
    for (std::size_t t = 0; t < length; ++t) s.bits_[t] = (index >> t) & 1U;
    return s;
}

void BitString::append(const BitString& other) { append(other.view()); }

void BitString::append(std::span<const Bit> other) { bits_.insert(bits_.end(), other.begin(), other.end()); }

void BitString::prepend(const BitString& other) { bits_.insert(bits_.begin(), other.bits_.begin(), other.bits_.end()); }

BitString BitString::slice(std::size_t first, std::size_t last) const {
    if (first > last || last > bits_.size()) throw std::out_of_range("BitString::slice out of range");
    return BitString(std::span<const Bit>(bits_).subspan(first, last - first));
}

BitString BitString::suffix_from(std::size_t first) const { return slice(first, bits_.size()); }

BitString BitString::reversed() const {
    BitString r;
    r.bits_.assign(bits_.rbegin(), bits_.rend());
    return r;
}

std::size_t BitString::count_zeros() const noexcept { return idspolar::count_zeros(bits_); }

std::uint64_t BitString::to_index() const {
    if (bits_.size() > 64) throw std::invalid_argument("to_index supports at most 64 bits");
    std::uint64_t v = 0;
    for (std::size_t t = 0; t < bits_.size(); ++t) v |= std::uint64_t{bits_[t]} << t;
    return v;
}

std::string BitString::to_string() const {
    std::string out(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i]) out[i] = '1';
    return out;
}

BitString operator+(BitString lhs, const BitString& rhs) {
    lhs.append(rhs);
    return lhs;
}

std::size_t count_zeros(std::span<const Bit> bits) noexcept {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), Bit{0}));
}

std::size_t BitStringHash::operator()(const BitString& s) const noexcept {
    // FNV-1a over the bits, with the length folded in so that leading zeros matter.
    std::uint64_t h = 1469598103934665603ULL ^ s.size();
    for (Bit b : s) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
}

}  // namespace idspolar

#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "idspolar/bitstring.hpp"

namespace idspolar {

class BadLength : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Codeword geometry: N = 2^n input bits in Phi = 2^(n-n0) blocks of N0 = 2^n0,
/// separated by guard bands whose run lengths are set by xi.
class GuardConfig {
public:
    /// Requires n >= n0 >= 1 and 0 < xi < 1/2 (n == n0 means a single block).
    GuardConfig(int n, int n0, double xi);

    int n() const noexcept { return n_; }
    int n0() const noexcept { return n0_; }
    double xi() const noexcept { return xi_; }

    std::size_t N() const noexcept { return std::size_t{1} << n_; }
    std::size_t N0() const noexcept { return std::size_t{1} << n0_; }
    std::size_t Phi() const noexcept { return std::size_t{1} << (n_ - n0_); }

    /// ell(m) = 2^floor((1 - xi)(m - 1)).
    std::size_t ell(int m) const;
    /// Length of each all-zero guard sub-block, ell(n0).
    std::size_t zero_run() const { return ell(n0_); }
    /// Window length h = ceil(ell(n0) * beta / 4), at least 1.
    int window_length(double beta) const;
    /// Level of the guard band between block i and block i+1 (0-based).
    int guard_level(std::size_t guard) const;

    friend bool operator==(const GuardConfig&, const GuardConfig&) = default;

private:
    int n_;
    int n0_;
    double xi_;
};

enum class SegmentKind { Block, GuardLeft, GuardMidLeft, GuardMidRight, GuardRight };

const char* to_string(SegmentKind kind);

struct Segment {
    SegmentKind kind;
    /// Block index for Block segments, guard index otherwise (guard i sits
    /// between block i and block i+1).
    std::size_t index;
    /// Guard level m (0 for blocks).
    int level;
    std::size_t start;
    std::size_t end;

    std::size_t length() const noexcept { return end - start; }
};

struct GuardLayout {
    std::vector<Segment> segments;

    std::size_t total_length() const noexcept { return segments.empty() ? 0 : segments.back().end; }
    /// Position in `segments` of block i, or of sub-block `kind` of guard i.
    std::size_t find(SegmentKind kind, std::size_t index) const;
    nlohmann::json to_json() const;
};

struct GuardedCodeword {
    BitString bits;
    GuardLayout layout;
};

/// g(x) = x when n <= n0, otherwise g(x_I) + g_n + g(x_II), with
/// g_n = 0(ell(n0)) 1(ell(n)) 1(ell(n)) 0(ell(n0)). Throws BadLength unless |x| = 2^n.
GuardedCodeword encode_with_guards(const BitString& x, const GuardConfig& cfg);

/// Closed form of |g(x)|.
std::size_t total_length(const GuardConfig& cfg);

std::vector<BitString> split_blocks(const BitString& x, const GuardConfig& cfg);

/// Concatenation of the block segments of `codeword`.
BitString strip_guards(const BitString& codeword, const GuardLayout& layout);

}  // namespace idspolar

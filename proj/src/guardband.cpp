#include "idspolar/guardband.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace idspolar {

GuardConfig::GuardConfig(int n, int n0, double xi) : n_(n), n0_(n0), xi_(xi) {
    if (n0 < 1 || n < n0 || n > 40) {
        std::ostringstream os;
        os << "guard config requires n >= n0 >= 1 (got n=" << n << ", n0=" << n0 << ")";
        throw std::invalid_argument(os.str());
    }
    if (!(xi > 0.0 && xi < 0.5)) throw std::invalid_argument("guard shrink exponent xi must lie in (0, 1/2)");
}

std::size_t GuardConfig::ell(int m) const {
    if (m < 1) throw std::invalid_argument("guard level must be at least 1");
    const auto exponent = static_cast<int>(std::floor((1.0 - xi_) * (m - 1)));
    return std::size_t{1} << exponent;
}

int GuardConfig::window_length(double beta) const {
    const double raw = static_cast<double>(zero_run()) * beta / 4.0;
    // Guard against products such as 8 * 1.0 / 4 landing a hair above an integer.
    const int h = static_cast<int>(std::ceil(raw - 1e-12));
    return h < 1 ? 1 : h;
}

int GuardConfig::guard_level(std::size_t guard) const {
    if (guard + 1 >= Phi()) throw std::out_of_range("guard index out of range");
    return n0_ + 1 + std::countr_zero(guard + 1);
}

const char* to_string(SegmentKind kind) {
    switch (kind) {
        case SegmentKind::Block: return "block";
        case SegmentKind::GuardLeft: return "guard_left";
        case SegmentKind::GuardMidLeft: return "guard_midleft";
        case SegmentKind::GuardMidRight: return "guard_midright";
        case SegmentKind::GuardRight: return "guard_right";
    }
    return "?";
}

std::size_t GuardLayout::find(SegmentKind kind, std::size_t index) const {
    // Blocks and guard quadruples alternate: block 0, guard 0 (4 parts), block 1, ...
    const std::size_t pos = kind == SegmentKind::Block ? 5 * index : 5 * index + static_cast<std::size_t>(kind);
    if (pos >= segments.size() || segments[pos].kind != kind || segments[pos].index != index)
        throw std::out_of_range("segment not present in layout");
    return pos;
}

nlohmann::json GuardLayout::to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : segments)
        out.push_back({{"kind", to_string(s.kind)}, {"index", s.index}, {"level", s.level}, {"start", s.start},
                       {"end", s.end}});
    return out;
}

namespace {

struct Builder {
    const GuardConfig& cfg;
    const BitString& x;
    GuardedCodeword out;
    std::size_t next_block = 0;

    void add(SegmentKind kind, std::size_t index, int level, const BitString& bits) {
        const std::size_t start = out.bits.size();
        out.bits.append(bits);
        out.layout.segments.push_back({kind, index, level, start, out.bits.size()});
    }

    void build(std::size_t offset, int m) {
        if (m <= cfg.n0()) {
            add(SegmentKind::Block, next_block++, 0, x.slice(offset, offset + cfg.N0()));
            return;
        }
        const std::size_t half = std::size_t{1} << (m - 1);
        build(offset, m - 1);
        const std::size_t guard = next_block - 1;
        const std::size_t zeros = cfg.zero_run();
        const std::size_t ones = cfg.ell(m);
        add(SegmentKind::GuardLeft, guard, m, BitString::zeros(zeros));
        add(SegmentKind::GuardMidLeft, guard, m, BitString::ones(ones));
        add(SegmentKind::GuardMidRight, guard, m, BitString::ones(ones));
        add(SegmentKind::GuardRight, guard, m, BitString::zeros(zeros));
        build(offset + half, m - 1);
    }
};

}  // namespace

GuardedCodeword encode_with_guards(const BitString& x, const GuardConfig& cfg) {
    if (x.size() != cfg.N()) {
        std::ostringstream os;
        os << "codeword has length " << x.size() << ", expected 2^" << cfg.n() << " = " << cfg.N();
        throw BadLength(os.str());
    }
    Builder b{cfg, x, {}};
    b.out.bits = BitString{};
    b.build(0, cfg.n());
    return std::move(b.out);
}

std::size_t total_length(const GuardConfig& cfg) {
    std::size_t length = cfg.N();
    for (int m = cfg.n0() + 1; m <= cfg.n(); ++m)
        length += (std::size_t{1} << (cfg.n() - m)) * (2 * cfg.zero_run() + 2 * cfg.ell(m));
    return length;
}

std::vector<BitString> split_blocks(const BitString& x, const GuardConfig& cfg) {
    if (x.size() != cfg.N()) throw BadLength("split_blocks expects a length-2^n string");
    std::vector<BitString> blocks;
    blocks.reserve(cfg.Phi());
    for (std::size_t i = 0; i < cfg.Phi(); ++i) blocks.push_back(x.slice(i * cfg.N0(), (i + 1) * cfg.N0()));
    return blocks;
}

BitString strip_guards(const BitString& codeword, const GuardLayout& layout) {
    BitString out;
    for (const auto& s : layout.segments)
        if (s.kind == SegmentKind::Block) out.append(codeword.view().subspan(s.start, s.length()));
    return out;
}

}  // namespace idspolar

#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Written directly from the channel's outcome list, without library helpers.

#include <cmath>
#include <functional>
#include <map>
#include <string>

namespace oracle {

struct P {
    double i, d, s;
};

// Outcome list for one input symbol c ('0' or '1').
inline std::map<std::string, double> symbol(const P& p, char c) {
    const char flip = c == '0' ? '1' : '0';
    std::map<std::string, double> m;
    m[""] += p.d;
    m[std::string(1, c)] += 1 - p.i - p.d - p.s;
    m[std::string(1, flip)] += p.s;
    m[std::string("0") + c] += p.i / 2;
    m[std::string("1") + c] += p.i / 2;
    return m;
}

// P(y | x) for every y, by expanding all 5^|x| outcome sequences.
inline std::map<std::string, double> outputs(const P& p, const std::string& x) {
    std::map<std::string, double> out;
    std::function<void(std::size_t, std::string, double)> rec = [&](std::size_t k, std::string y, double w) {
        if (w == 0.0) return;
        if (k == x.size()) {
            out[y] += w;
            return;
        }
        for (const auto& [o, q] : symbol(p, x[k])) rec(k + 1, y + o, w * q);
    };
    rec(0, "", 1.0);
    return out;
}

inline std::string bits(unsigned value, int width) {
    std::string s;
    for (int t = 0; t < width; ++t) s.push_back(((value >> t) & 1U) ? '1' : '0');
    return s;
}

}  // namespace oracle

#pragma once

// Test-only random source with scripted draws, for exact operator checks.

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>

namespace genelab::testing {

class script_rng {
public:
    std::deque<double> normals;
    std::deque<double> reals;
    std::deque<std::int64_t> ints;
    std::deque<bool> bools;

    double normal() { return pop(normals, "normal"); }
    double uniform_real(double, double) { return pop(reals, "uniform_real"); }
    std::int64_t uniform_int(std::int64_t, std::int64_t) {
        return pop(ints, "uniform_int");
    }
    bool bernoulli(double) { return pop(bools, "bernoulli"); }

private:
    template <typename Q>
    static typename Q::value_type pop(Q& q, const char* what) {
        if (q.empty())
            throw std::runtime_error(std::string("script_rng: out of ") + what);
        auto v = q.front();
        q.pop_front();
        return v;
    }
};

}  // namespace genelab::testing

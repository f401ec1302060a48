#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "yb/algebra.hpp"

namespace yb {

// Raised when a coefficient is evaluated closer than the margin to a pole.
struct PoleMarginError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Raised when rejection sampling or a truncated window gives up.
struct NumericHazard : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense complex array of shape m^rank, row-major.
class Arr {
public:
    Arr() = default;
    Arr(int m, int rank) : m_(m), rank_(rank), v_(ipow(m, rank)) {}

    int m() const { return m_; }
    int rank() const { return rank_; }
    std::size_t size() const { return v_.size(); }
    cx* data() { return v_.data(); }
    const cx* data() const { return v_.data(); }
    cx& operator[](std::size_t i) { return v_[i]; }
    const cx& operator[](std::size_t i) const { return v_[i]; }

    template <class... I>
    cx& operator()(I... idx) {
        return v_[flat({static_cast<int>(idx)...})];
    }
    template <class... I>
    const cx& operator()(I... idx) const {
        return v_[flat({static_cast<int>(idx)...})];
    }

    Arr& operator+=(const Arr& o);
    Arr& operator-=(const Arr& o);
    Arr& operator*=(cx s);
    friend Arr operator+(Arr a, const Arr& b) { return a += b; }
    friend Arr operator-(Arr a, const Arr& b) { return a -= b; }
    friend Arr operator*(Arr a, cx s) { return a *= s; }
    friend Arr operator*(cx s, Arr a) { return a *= s; }

    double max_abs() const;
    // permute axes: result(i_perm[0], ...) pattern, out axis k = input axis perm[k]
    Arr transposed(const std::vector<int>& perm) const;

    static int ipow(int b, int e) {
        int r = 1;
        for (int i = 0; i < e; ++i) r *= b;
        return r;
    }

private:
    std::size_t flat(std::initializer_list<int> idx) const {
        std::size_t f = 0;
        for (int i : idx) f = f * m_ + i;
        return f;
    }
    int m_ = 0;
    int rank_ = 0;
    std::vector<cx> v_;
};

// einsum("tqki,rsjt->ijkqrs", A, B): product of two arrays, summing letters
// absent from the output.
Arr einsum(const std::string& spec, const Arr& a, const Arr& b);
Arr einsum(const std::string& spec, const Arr& a);

// X^{pq}_{ij} = delta^p_i delta^q_j  and  delta^q_i delta^p_j, stored [p,q,i,j]
Arr identity_tensor(int m);
Arr exchange_tensor(int m);

struct PoleLocus {
    std::string what;
    std::function<double(const cx*)> distance;
};

// A map from 2 or 4 parameters to an m^rank array. Four-index arrays are
// stored [up1, up2, lo1, lo2], i.e. r^{jm}_{ik} lives at (j, m, i, k).
struct CoefficientFunction {
    std::string name;
    int arity = 4;
    int m = 1;
    int rank = 4;
    std::function<Arr(const cx*)> fn;
    std::vector<PoleLocus> poles;

    // throws PoleMarginError inside the margin
    Arr eval(const cx* args, double margin) const;
    Arr eval(std::initializer_list<cx> args, double margin) const;
    // no margin check
    Arr raw(std::initializer_list<cx> args) const;
    double pole_distance(const cx* args) const;
};

using ScalarFn2 = std::function<cx(cx, cx)>;
using ScalarFn4 = std::function<cx(cx, cx, cx, cx)>;

CoefficientFunction scalar4(std::string name, ScalarFn4 f, std::vector<PoleLocus> poles = {});
CoefficientFunction scalar2(std::string name, ScalarFn2 f, std::vector<PoleLocus> poles = {});
CoefficientFunction constant4(std::string name, const Arr& value, int arity);
CoefficientFunction zero_coefficient(int m, int arity, int rank = 4);
// f(args) * T for a fixed array T
CoefficientFunction times(const CoefficientFunction& scalar, const Arr& t);
CoefficientFunction sum(const CoefficientFunction& a, const CoefficientFunction& b);
CoefficientFunction scale(const CoefficientFunction& a, cx s);

PoleLocus diff_pole(std::string what, int i, int j);  // args[i] == args[j]

// ---- residual bookkeeping --------------------------------------------------
struct SampleResidual {
    double abs = 0.0;   // max |LHS - RHS|
    double term = 0.0;  // max |individual term|
    double rel() const { return abs / (1.0 + term); }
};

// accumulate sum of terms, tracking the largest single term entry
class ResidualAccumulator {
public:
    void add(const Arr& term, cx sign = 1.0);
    void add(cx term, cx sign = 1.0);
    SampleResidual result() const;
    const Arr& total() const { return total_; }

private:
    Arr total_;
    bool scalar_ = false;
    cx stotal_{};
    double term_ = 0.0;
};

struct ResidualReport {
    std::string identity;
    int samples = 0;
    double max_abs_residual = 0.0;
    double relative_residual = 0.0;
    std::vector<std::pair<std::string, cx>> argmax;
    double tolerance = 0.0;
    bool pass = true;
};

// ---- sampling ----------------------------------------------------------------
struct SampleBox {
    double re_lo = -1.0, re_hi = 1.0;
    double im_lo = -1.0, im_hi = 1.0;
};

struct SamplingConfig {
    std::uint64_t seed = 42;
    int samples = 200;
    double margin = 0.05;
    SampleBox box{};
    int workers = 1;
    int max_redraws = 10000;
};

// Deterministic generator for sample `index` under `seed`.
std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t attempt = 0);

Assignment draw_assignment(const std::vector<Tag>& tags, const SampleBox& box, std::uint64_t seed);

// Evaluate `one` at `samples` assignments drawn per (seed, index). A
// PoleMarginError triggers a redraw; results are reduced in index order.
using SampleFn = std::function<std::vector<SampleResidual>(const Assignment&)>;

std::vector<ResidualReport> run_samples(const std::vector<std::string>& identities,
                                        const std::vector<Tag>& tags, const SampleFn& one,
                                        const SamplingConfig& cfg, double tolerance);

ResidualReport single_report(const std::string& identity, const SampleResidual& r,
                             double tolerance, const Assignment* at = nullptr);

// Run body(i) for i in [0, n) over `workers` threads.
void parallel_for(int n, int workers, const std::function<void(int)>& body);

}  // namespace yb

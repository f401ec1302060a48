#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "yb/algebra.hpp"
#include "yb/residuals.hpp"
#include "yb/tensor.hpp"

namespace yb {

enum class Ansatz {
    FourParamExchange,            // E_i(u,x), coefficients alpha beta gamma delta (arity 4)
    OneParamQuadratic,            // E_i(u),   coefficients alpha beta gamma delta (arity 2)
    Linear,                       // E_i(u),   coefficients a b (arity 2, rank 3 stored [k,i,j])
    QuadraticPoissonCommutative,  // e_i(u,x), coefficients beta r (commutative bracket)
    OneParamPoisson,              // e_i(u),   coefficient alpha (commutative bracket)
    Constant,                     // e_i, a table of generator brackets
};

std::string to_string(Ansatz a);

using SymTensor2 = Tensor2<Sym>;
using SymTensor3 = Tensor3<Sym>;
using SymFree = Free<Sym>;

struct BracketRule {
    std::string name;
    Ansatz kind = Ansatz::OneParamQuadratic;
    int m = 1;
    std::vector<CoefficientFunction> coef;
    std::vector<bool> vanishing;  // coef[k] is identically zero: its terms are skipped
    // Constant rules: {{e_i, e_j}} for i <= j listed as given; other pairs by antisymmetry.
    std::map<std::pair<int, int>, Tensor2<cx>> table;

    int arity() const;  // slot arity of the generators
    AlgebraSpec spec() const { return {m, arity()}; }
    bool active(int k) const { return k < static_cast<int>(coef.size()) && !vanishing[k]; }
};

BracketRule four_param_rule(std::string name, const CoefficientFunction& alpha,
                            const CoefficientFunction& beta, const CoefficientFunction& gamma,
                            const CoefficientFunction& delta);
BracketRule one_param_rule(std::string name, const CoefficientFunction& alpha,
                           const CoefficientFunction& beta, const CoefficientFunction& gamma,
                           const CoefficientFunction& delta);
BracketRule linear_rule(std::string name, const CoefficientFunction& a, const CoefficientFunction& b);
BracketRule commutative_rule(std::string name, const CoefficientFunction& beta,
                             const CoefficientFunction& r);
BracketRule one_param_poisson_rule(std::string name, const CoefficientFunction& alpha);
BracketRule constant_rule(std::string name, int m,
                          std::map<std::pair<int, int>, Tensor2<cx>> table);

// ---- double brackets ------------------------------------------------------------
SymTensor2 bracket_generators(const BracketRule& rule, const Generator& a, const Generator& b);
// right slot by Leibniz, left slot by antisymmetry
SymTensor2 bracket_extend(const BracketRule& rule, const SymFree& a, const SymFree& b);
SymTensor2 bracket_extend(const BracketRule& rule, const FreeElement& a, const FreeElement& b);

struct JacobiTerms {
    SymTensor3 total;
    std::array<SymTensor3, 3> parts;  // the three cyclic summands
};
JacobiTerms double_jacobi(const BracketRule& rule, const FreeElement& a, const FreeElement& b,
                          const FreeElement& c);

// Evaluates coefficient atoms at an assignment, caching whole arrays.
class CoefficientEvaluator {
public:
    CoefficientEvaluator(const BracketRule& rule, const Assignment& asg, double margin)
        : rule_(rule), asg_(asg), margin_(margin) {}
    cx operator()(const Atom& a);
    const Arr& array(int fn, const std::array<Tag, 4>& args, int nargs);
    AtomEval fn() {
        return [this](const Atom& a) { return (*this)(a); };
    }

private:
    const BracketRule& rule_;
    const Assignment& asg_;
    double margin_;
    std::map<std::pair<int, std::array<std::string, 4>>, Arr> cache_;
};

template <class Key>
SampleResidual residual_of(const Combination<Key, Sym>& total,
                           const std::vector<const Combination<Key, Sym>*>& parts,
                           CoefficientEvaluator& ev) {
    SampleResidual r;
    r.abs = max_abs(evaluate(total, ev.fn()));
    for (const auto* p : parts) r.term = std::max(r.term, max_abs(evaluate(*p, ev.fn())));
    return r;
}

SampleResidual double_jacobi_residual(const BracketRule& rule, const JacobiTerms& j,
                                      const Assignment& asg, double margin);

// ---- relation chains ------------------------------------------------------------
struct NamedResidual {
    std::string name;
    SampleResidual value;
};

// eleven relations of the four-parameter double Lie bracket, then four skew checks
std::vector<NamedResidual> theorem2_relation_residuals(const BracketRule& rule, const Six& s,
                                                       double margin);
// alpha/beta system, the gamma/delta lines, skew checks, and the m = 1 reduced system
std::vector<NamedResidual> oneparam_relation_residuals(const BracketRule& rule, cx u, cx v, cx w,
                                                       double margin);
std::vector<NamedResidual> linear_relation_residuals(const BracketRule& rule, cx u, cx v, cx w,
                                                     double margin);
// associativity of E_i(u)E_j(v) = a^k_ij(u,v) E_k(u) + b^k_ij(u,v) E_k(v)
SampleResidual linear_associativity_residual(const BracketRule& rule, cx u, cx v, cx w,
                                             double margin);

struct EquivalencePair {
    SampleResidual relations, associativity;
};
EquivalencePair associativity_equivalence_check(const BracketRule& rule, cx u, cx v, cx w,
                                                double margin);

// ---- trace and commutative brackets ------------------------------------------------
Trace<Sym> trace_bracket(const BracketRule& rule, const FreeElement& a, const FreeElement& b);
TraceElement trace_bracket(const BracketRule& rule, const FreeElement& a, const FreeElement& b,
                           const Assignment& asg, double margin);

// Jacobi cyclic sum of the commutative bracket on three generators with the given slots.
SampleResidual commutative_jacobi_oracle(const BracketRule& rule, const Generator& a,
                                         const Generator& b, const Generator& c,
                                         const Assignment& asg, double margin);

// ---- constant brackets from polynomial generators ---------------------------------
// E_i(x) = sum_a e_{i a} x^a, a = 0..n; e_{i a} is constant generator i*(n+1)+a.
struct ExpansionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Expansion {
    BracketRule rule;      // Constant, m*(n+1) generators
    double remainder = 0;  // largest coefficient of the division remainder
};
Expansion expand_polynomial_generators(const BracketRule& rule, int n);

}  // namespace yb

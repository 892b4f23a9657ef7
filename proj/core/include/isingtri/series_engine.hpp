#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "isingtri/mp.hpp"
#include "isingtri/nupoly.hpp"

namespace isingtri::series {

// Exact table of [t^n] z_{p,q}(nu) built from the two boundary-deletion
// recursions, graded by t-order. Storage is triangular in (p,q): only
// p >= q is kept, the rest is answered through the spin-flip symmetry.
// A finished table is immutable and safe to share across threads.
class PartitionTable {
  public:
    explicit PartitionTable(std::size_t order_budget = 64)
        : order_budget_(order_budget) {}

    std::size_t max_order() const { return max_order_; }
    std::size_t order_budget() const { return order_budget_; }

    // Exact coefficient [t^n] z_{p,q}; zero outside the stored wedge
    // (p+q <= 2n) by the edge-count lower bound.
    const NuPolynomial& entry(std::size_t p, std::size_t q, std::size_t n) const;

    // Whole series for one boundary condition, truncated at max_order().
    TSeries series(std::size_t p, std::size_t q) const;

    // Test hook: overwrite one stored coefficient (used to confirm the
    // functional-equation check is sensitive to corruption).
    void poke(std::size_t p, std::size_t q, std::size_t n, NuPolynomial v);

  private:
    friend PartitionTable extend_table(PartitionTable table, std::size_t target_order);
    friend PartitionTable load_table(std::istream& is);

    // storage_[s][q][n] with s = p+q (s >= 1), q <= s/2, n <= max_order_
    std::vector<std::vector<std::vector<NuPolynomial>>> storage_;
    std::size_t max_order_ = 0;
    std::size_t order_budget_;
};

// Grow `table` so that every coefficient with n <= target_order and
// p+q <= 2n is exact. Throws capacity_error beyond the order budget.
PartitionTable extend_table(PartitionTable table, std::size_t target_order);

struct EvalResult {
    Real value;
    Real truncation_bound;
};

// Numeric evaluation of the truncated partition series at (t, nu), with a
// heuristic tail bound from a geometric / power-law fit of the last terms.
// Throws domain_error for t outside [0, t_c(nu)].
EvalResult eval_partition(std::size_t p, std::size_t q, const Real& t, const Real& nu,
                          const PartitionTable& table);

// Exact rational evaluation of the truncated series (used where the law
// normalization must hold identically).
BigRational eval_partition_exact(std::size_t p, std::size_t q, const BigRational& t,
                                 const BigRational& nu, const PartitionTable& table,
                                 std::size_t order);

struct ResidualReport {
    std::size_t order = 0;
    BigInt max_abs_eq_dobrushin; // first equation of the system
    BigInt max_abs_eq_mono;      // second equation (monochromatic boundary)
    bool exact_zero() const { return max_abs_eq_dobrushin == 0 && max_abs_eq_mono == 0; }
};

// Assemble both functional equations as truncated series and report the
// largest absolute coefficient of their residuals through t-order `order`.
// With exact arithmetic a correct table gives exactly zero.
ResidualReport check_master_equation(const PartitionTable& table, std::size_t order);

// Versioned JSON serialization (numerator/denominator string pairs).
void save_table(const PartitionTable& table, std::ostream& os);
PartitionTable load_table(std::istream& is);

} // namespace isingtri::series

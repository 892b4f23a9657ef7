#include "isingtri/series_engine.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "isingtri/constants.hpp"
#include "isingtri/errors.hpp"

namespace isingtri::series {

namespace {
const NuPolynomial kZero{};
} // namespace

std::string NuPolynomial::to_string() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = c.size(); i-- > 0;) {
        if (c[i] == 0) continue;
        if (!first) os << " + ";
        if (i == 0 || c[i] != 1) os << c[i].str();
        if (i > 0) {
            if (c[i] != 1) os << "*";
            os << "nu";
            if (i > 1) os << "^" << i;
        }
        first = false;
    }
    return os.str();
}

const NuPolynomial& PartitionTable::entry(std::size_t p, std::size_t q, std::size_t n) const {
    if (p < q) std::swap(p, q);
    std::size_t s = p + q;
    if (s == 0 || n == 0 || n > max_order_ || s > 2 * n) return kZero;
    if (s > storage_.size()) return kZero;
    return storage_[s - 1][q][n];
}

TSeries PartitionTable::series(std::size_t p, std::size_t q) const {
    TSeries ts(max_order_);
    for (std::size_t n = 0; n <= max_order_; ++n) ts.coeffs[n] = entry(p, q, n);
    return ts;
}

void PartitionTable::poke(std::size_t p, std::size_t q, std::size_t n, NuPolynomial v) {
    if (p < q) std::swap(p, q);
    std::size_t s = p + q;
    if (s == 0 || s > storage_.size() || n > max_order_)
        throw domain_error("poke outside stored wedge");
    storage_[s - 1][q][n] = std::move(v);
}

PartitionTable extend_table(PartitionTable table, std::size_t target_order) {
    if (target_order > table.order_budget_)
        throw capacity_error("requested order " + std::to_string(target_order) +
                             " exceeds budget " + std::to_string(table.order_budget_));
    if (target_order <= table.max_order_) return table;

    const std::size_t smax = 2 * target_order;
    table.storage_.resize(smax);
    for (std::size_t s = 1; s <= smax; ++s) {
        auto& row = table.storage_[s - 1];
        row.resize(s / 2 + 1);
        for (auto& cell : row) cell.resize(target_order + 1);
    }

    for (std::size_t n = table.max_order_ + 1; n <= target_order; ++n) {
        // entries at order n depend only on order n-1: rows are independent
        std::vector<std::pair<std::size_t, std::size_t>> cells;
        for (std::size_t s = 1; s <= 2 * n; ++s)
            for (std::size_t q = 0; q <= s / 2; ++q) cells.emplace_back(s, q);

        table.max_order_ = n - 1; // entry() may serve reads below n
#pragma omp parallel for schedule(dynamic, 8)
        for (std::ptrdiff_t ci = 0; ci < (std::ptrdiff_t)cells.size(); ++ci) {
            const std::size_t s = cells[ci].first, q = cells[ci].second;
            const std::size_t p = s - q;
            NuPolynomial acc;
            if (q == 0) {
                acc.add(table.entry(p + 1, 0, n - 1));
                acc.add(table.entry(p, 1, n - 1));
                for (std::size_t k = 0; k < p; ++k) {
                    for (std::size_t j = 1; j + 1 <= n - 1; ++j) {
                        const NuPolynomial& a = table.entry(p - k, 0, j);
                        if (a.is_zero()) continue;
                        const NuPolynomial& b = table.entry(k + 1, 0, n - 1 - j);
                        if (b.is_zero()) continue;
                        acc.add_mul(a, b);
                    }
                }
                if (p == 2 && n == 1) acc.add(NuPolynomial::constant(1));
                acc.shift_nu(); // prefactor t*nu
            } else {
                acc.add(table.entry(p + 1, q, n - 1));
                acc.add(table.entry(p, q + 1, n - 1));
                for (std::size_t k = 0; k < p; ++k) {
                    for (std::size_t j = 1; j + 1 <= n - 1; ++j) {
                        const NuPolynomial& a = table.entry(p - k, q, j);
                        if (a.is_zero()) continue;
                        const NuPolynomial& b = table.entry(k + 1, 0, n - 1 - j);
                        if (b.is_zero()) continue;
                        acc.add_mul(a, b);
                    }
                }
                for (std::size_t k = 0; k < q; ++k) {
                    for (std::size_t j = 1; j + 1 <= n - 1; ++j) {
                        const NuPolynomial& a = table.entry(p, q - k, j);
                        if (a.is_zero()) continue;
                        const NuPolynomial& b = table.entry(0, k + 1, n - 1 - j);
                        if (b.is_zero()) continue;
                        acc.add_mul(a, b);
                    }
                }
                if (p == 1 && q == 1 && n == 1) acc.add(NuPolynomial::constant(1));
            }
            acc.trim();
            table.storage_[s - 1][q][n] = std::move(acc);
        }
        table.max_order_ = n;
    }
    return table;
}

EvalResult eval_partition(std::size_t p, std::size_t q, const Real& t, const Real& nu,
                          const PartitionTable& table) {
    if (t < 0) throw domain_error("negative edge weight");
    if (nu <= 0) throw domain_error("nu must be positive");
    if (t > 0) {
        Real tc = constants::t_c_of_nu(nu);
        if (t > tc * (1 + Real("1e-100")))
            throw domain_error("t above the critical edge weight; series may diverge");
    }

    Real value(0), tn(1);
    std::vector<std::pair<std::size_t, Real>> terms;
    for (std::size_t n = 1; n <= table.max_order(); ++n) {
        tn = (n == 1) ? t : tn * t;
        const NuPolynomial& cf = table.entry(p, q, n);
        if (cf.is_zero()) continue;
        Real term = cf.eval(nu) * tn;
        value += term;
        terms.emplace_back(n, term);
    }

    Real bound(0);
    if (!terms.empty() && t > 0) {
        // geometric estimate from the last ratio, power-law estimate from
        // the last two nonzero terms; take the larger of the valid ones
        auto [n2, a2] = terms.back();
        if (terms.size() >= 2) {
            auto [n1, a1] = terms[terms.size() - 2];
            Real r = pow(a2 / a1, Real(1) / Real((double)(n2 - n1)));
            if (r < 1) {
                Real geo = a2 * r / (1 - r);
                Real powtail(0);
                if (a2 < a1) {
                    Real alpha = log(a1 / a2) / log(Real((double)n2) / Real((double)n1));
                    if (alpha > 1) powtail = a2 * Real((double)n2) / (alpha - 1);
                }
                bound = std::max(geo, powtail);
            } else {
                bound = a2 * Real((double)table.max_order()); // no decay seen yet
            }
        } else {
            bound = a2;
        }
    }
    return {value, bound};
}

BigRational eval_partition_exact(std::size_t p, std::size_t q, const BigRational& t,
                                 const BigRational& nu, const PartitionTable& table,
                                 std::size_t order) {
    if (order > table.max_order()) throw capacity_error("table shorter than requested order");
    BigRational value(0), tn(1);
    for (std::size_t n = 1; n <= order; ++n) {
        tn *= t;
        const NuPolynomial& cf = table.entry(p, q, n);
        if (cf.is_zero()) continue;
        value += cf.eval(nu) * tn;
    }
    return value;
}

namespace {

void residual_max(NuPolynomial& lhs, const NuPolynomial& rhs, BigInt& worst) {
    // worst = max(worst, max_abs(lhs - rhs))
    NuPolynomial diff = lhs;
    std::size_t m = std::max(diff.c.size(), rhs.c.size());
    diff.c.resize(m, BigInt(0));
    for (std::size_t i = 0; i < rhs.c.size(); ++i) diff.c[i] -= rhs.c[i];
    for (const auto& v : diff.c) {
        BigInt a = v < 0 ? BigInt(-v) : v;
        if (a > worst) worst = a;
    }
}

} // namespace

ResidualReport check_master_equation(const PartitionTable& table, std::size_t order) {
    if (order > table.max_order()) throw capacity_error("table shorter than requested order");
    ResidualReport rep;
    rep.order = order;
    rep.max_abs_eq_dobrushin = 0;
    rep.max_abs_eq_mono = 0;

    for (std::size_t n = 1; n <= order; ++n) {
        const std::size_t cap = 2 * n;
        // first equation, coefficient of t^n u^p v^q
        for (std::size_t p = 0; p <= cap; ++p) {
            for (std::size_t q = 0; p + q <= cap; ++q) {
                NuPolynomial rhs;
                // (Z - u Z1(v) + Z Z0(u)) / u  -> take [u^{p+1} v^q] at t-order n-1
                if (q >= 1) {
                    rhs.add(table.entry(p + 1, q, n - 1));
                    if (p == 0) {
                        NuPolynomial neg = table.entry(q, 1, n - 1);
                        for (auto& v : neg.c) v = -v;
                        rhs.add(neg);
                    }
                    for (std::size_t a = 1; a <= p; ++a)
                        for (std::size_t j = 1; j + 1 <= n - 1; ++j) {
                            const NuPolynomial& za = table.entry(a, q, j);
                            if (za.is_zero()) continue;
                            const NuPolynomial& zb = table.entry(p + 1 - a, 0, n - 1 - j);
                            if (zb.is_zero()) continue;
                            rhs.add_mul(za, zb);
                        }
                }
                // symmetric block in v
                if (p >= 1) {
                    rhs.add(table.entry(p, q + 1, n - 1));
                    if (q == 0) {
                        NuPolynomial neg = table.entry(p, 1, n - 1);
                        for (auto& v : neg.c) v = -v;
                        rhs.add(neg);
                    }
                    for (std::size_t a = 1; a <= q; ++a)
                        for (std::size_t j = 1; j + 1 <= n - 1; ++j) {
                            const NuPolynomial& za = table.entry(p, a, j);
                            if (za.is_zero()) continue;
                            const NuPolynomial& zb = table.entry(0, q + 1 - a, n - 1 - j);
                            if (zb.is_zero()) continue;
                            rhs.add_mul(za, zb);
                        }
                }
                if (p == 1 && q == 1 && n == 1) rhs.add(NuPolynomial::constant(1));
                rhs.trim();

                NuPolynomial lhs;
                if (p >= 1 && q >= 1) lhs = table.entry(p, q, n);
                residual_max(lhs, rhs, rep.max_abs_eq_dobrushin);
            }
        }

        // second equation, coefficient of t^n u^p
        for (std::size_t p = 0; p <= cap; ++p) {
            NuPolynomial rhs;
            rhs.add(table.entry(p + 1, 0, n - 1));
            if (p == 0) {
                NuPolynomial neg = table.entry(1, 0, n - 1);
                for (auto& v : neg.c) v = -v;
                rhs.add(neg);
            }
            for (std::size_t a = 1; a <= p; ++a)
                for (std::size_t j = 1; j + 1 <= n - 1; ++j) {
                    const NuPolynomial& za = table.entry(a, 0, j);
                    if (za.is_zero()) continue;
                    const NuPolynomial& zb = table.entry(p + 1 - a, 0, n - 1 - j);
                    if (zb.is_zero()) continue;
                    rhs.add_mul(za, zb);
                }
            if (p >= 1) rhs.add(table.entry(p, 1, n - 1));
            if (p == 2 && n == 1) rhs.add(NuPolynomial::constant(1));
            rhs.trim();
            rhs.shift_nu();

            NuPolynomial lhs;
            if (p >= 1) lhs = table.entry(p, 0, n);
            residual_max(lhs, rhs, rep.max_abs_eq_mono);
        }
    }
    return rep;
}

void save_table(const PartitionTable& table, std::ostream& os) {
    nlohmann::json j;
    j["format"] = "isingtri-partition-table";
    j["version"] = 1;
    j["max_order"] = table.max_order();
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t n = 1; n <= table.max_order(); ++n) {
        for (std::size_t s = 1; s <= 2 * n; ++s) {
            for (std::size_t q = 0; q <= s / 2; ++q) {
                const NuPolynomial& e = table.entry(s - q, q, n);
                if (e.is_zero()) continue;
                nlohmann::json coeffs = nlohmann::json::array();
                for (const auto& c : e.c)
                    coeffs.push_back(nlohmann::json::array({c.str(), "1"}));
                entries.push_back(nlohmann::json::array({s - q, q, n, coeffs}));
            }
        }
    }
    j["entries"] = std::move(entries);
    os << j.dump();
}

PartitionTable load_table(std::istream& is) {
    nlohmann::json j;
    is >> j;
    if (j.value("format", "") != std::string("isingtri-partition-table"))
        throw io_error("not a partition table file");
    if (j.value("version", 0) != 1) throw io_error("unsupported table version");
    std::size_t max_order = j.at("max_order").get<std::size_t>();

    PartitionTable table(std::max<std::size_t>(max_order, 64));
    table.max_order_ = max_order;
    const std::size_t smax = 2 * max_order;
    table.storage_.resize(smax);
    for (std::size_t s = 1; s <= smax; ++s) {
        auto& row = table.storage_[s - 1];
        row.resize(s / 2 + 1);
        for (auto& cell : row) cell.resize(max_order + 1);
    }
    for (const auto& ent : j.at("entries")) {
        std::size_t p = ent.at(0).get<std::size_t>();
        std::size_t q = ent.at(1).get<std::size_t>();
        std::size_t n = ent.at(2).get<std::size_t>();
        if (p < q) std::swap(p, q);
        std::size_t s = p + q;
        if (s == 0 || s > smax || n > max_order) throw io_error("entry outside wedge");
        NuPolynomial poly;
        for (const auto& pair : ent.at(3)) {
            BigInt num(pair.at(0).get<std::string>());
            if (pair.at(1).get<std::string>() != "1")
                throw io_error("non-integer coefficient in table");
            poly.c.push_back(num);
        }
        poly.trim();
        table.storage_[s - 1][q][n] = std::move(poly);
    }
    return table;
}

} // namespace isingtri::series

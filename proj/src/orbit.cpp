#include "lawvar/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace lawvar {

std::string to_string(SpanClass c) {
    switch (c) {
        case SpanClass::FullSpace: return "FullSpace";
        case SpanClass::MeanZeroHyperplane: return "MeanZeroHyperplane";
        case SpanClass::ConstantLine: return "ConstantLine";
        case SpanClass::Zero: return "Zero";
    }
    throw std::logic_error("unknown span class");
}

void to_json(nlohmann::json& j, const OrbitReport& report) {
    j = nlohmann::json{{"rank", report.rank},
                       {"classification", to_string(report.classification)},
                       {"generators_used", report.generators_used}};
}

std::vector<RandomVariable> orbit_spanning_set(const RandomVariable& z) {
    if (is_constant(z, 0.0)) return {z};

    int n = z.size();
    std::vector<double> sorted(z.values());
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front();
    const double hi = sorted.back();
    const std::vector<double> rest(sorted.begin() + 1, sorted.end() - 1);

    std::vector<RandomVariable> out;
    std::set<std::vector<double>> seen;
    auto push = [&](std::vector<double> v) {
        if (seen.insert(v).second) out.emplace_back(z.space(), std::move(v));
    };

    push(z.values());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            std::vector<double> w(n);
            w[i] = lo;
            w[j] = hi;
            std::size_t next = 0;
            for (int k = 0; k < n; ++k) {
                if (k != i && k != j) w[k] = rest[next++];
            }
            std::vector<double> swapped(w);
            std::swap(swapped[i], swapped[j]);
            push(std::move(w));
            push(std::move(swapped));
        }
    }
    return out;
}

int matrix_rank(std::vector<std::vector<double>> rows, double rel_tol) {
    if (rows.empty()) return 0;
    const std::size_t m = rows.size(), n = rows.front().size();
    double scale = 0.0;
    for (const auto& r : rows)
        for (double v : r) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0;

    std::size_t rank = 0;
    for (std::size_t col = 0; col < n && rank < m; ++col) {
        std::size_t pivot = rank;
        for (std::size_t i = rank + 1; i < m; ++i) {
            if (std::abs(rows[i][col]) > std::abs(rows[pivot][col])) pivot = i;
        }
        double p = rows[pivot][col];
        if (std::abs(p) <= rel_tol * scale) continue;
        scale = std::max(scale, std::abs(p));
        std::swap(rows[pivot], rows[rank]);
        for (std::size_t i = rank + 1; i < m; ++i) {
            double factor = rows[i][col] / p;
            if (factor == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) rows[i][j] -= factor * rows[rank][j];
        }
        ++rank;
    }
    return static_cast<int>(rank);
}

int matrix_rank_exact(const std::vector<std::vector<long long>>& rows) {
    if (rows.empty()) return 0;
    using Wide = __int128;
    const std::size_t m = rows.size(), n = rows.front().size();
    std::vector<std::vector<Wide>> a(m, std::vector<Wide>(n));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = rows[i][j];

    // Entries stay bounded by minors of the input (Bareiss); guard anyway.
    const Wide limit = Wide(1) << 120;
    auto guarded = [&](Wide v) {
        if (v > limit || v < -limit) throw std::runtime_error("exact rank overflow");
        return v;
    };

    Wide prev = 1;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < n && rank < m; ++col) {
        std::size_t pivot = rank;
        while (pivot < m && a[pivot][col] == 0) ++pivot;
        if (pivot == m) continue;
        std::swap(a[pivot], a[rank]);
        for (std::size_t i = rank + 1; i < m; ++i) {
            for (std::size_t j = col + 1; j < n; ++j) {
                a[i][j] = guarded(guarded(a[rank][col] * a[i][j]) - guarded(a[i][col] * a[rank][j])) / prev;
            }
            a[i][col] = 0;
        }
        prev = a[rank][col];
        ++rank;
    }
    return static_cast<int>(rank);
}

std::vector<std::vector<double>> nullspace_basis(std::vector<std::vector<double>> rows,
                                                 double rel_tol) {
    if (rows.empty()) return {};
    const std::size_t m = rows.size(), n = rows.front().size();
    double scale = 0.0;
    for (const auto& r : rows)
        for (double v : r) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;

    // Reduced row echelon form, tracking pivot columns.
    std::vector<std::size_t> pivot_col;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < n && rank < m; ++col) {
        std::size_t pivot = rank;
        for (std::size_t i = rank + 1; i < m; ++i) {
            if (std::abs(rows[i][col]) > std::abs(rows[pivot][col])) pivot = i;
        }
        if (std::abs(rows[pivot][col]) <= rel_tol * scale) continue;
        std::swap(rows[pivot], rows[rank]);
        double p = rows[rank][col];
        for (std::size_t j = col; j < n; ++j) rows[rank][j] /= p;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == rank) continue;
            double factor = rows[i][col];
            if (factor == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) rows[i][j] -= factor * rows[rank][j];
        }
        pivot_col.push_back(col);
        ++rank;
    }

    std::vector<bool> is_pivot(n, false);
    for (std::size_t c : pivot_col) is_pivot[c] = true;

    std::vector<std::vector<double>> basis;
    for (std::size_t free = 0; free < n; ++free) {
        if (is_pivot[free]) continue;
        std::vector<double> v(n, 0.0);
        v[free] = 1.0;
        for (std::size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = -rows[r][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

OrbitReport orbit_span_dimension(const RandomVariable& z, const Tolerances& tol) {
    auto generators = orbit_spanning_set(z);
    OrbitReport report;
    report.generators_used = static_cast<int>(generators.size());

    bool integral = true;
    for (double v : z.values()) {
        if (std::abs(v - std::round(v)) > 1e-9 || std::abs(v) > 1e15) {
            integral = false;
            break;
        }
    }
    // Fraction-free elimination grows entries like Hadamard minors; only take
    // the exact path when twice that bit count fits a 128-bit accumulator.
    if (integral) {
        double n = z.size();
        double bits = n * (0.5 * std::log2(n) + std::log2(z.max_abs() + 2.0));
        if (2.0 * bits + 4.0 >= 126.0) integral = false;
    }

    if (integral) {
        std::vector<std::vector<long long>> rows;
        rows.reserve(generators.size());
        for (const auto& g : generators) {
            std::vector<long long> row(g.size());
            for (int i = 0; i < g.size(); ++i) row[i] = std::llround(g[i]);
            rows.push_back(std::move(row));
        }
        report.rank = matrix_rank_exact(rows);
    } else {
        std::vector<std::vector<double>> rows;
        rows.reserve(generators.size());
        for (const auto& g : generators) rows.push_back(g.values());
        report.rank = matrix_rank(std::move(rows), tol.rank_rel);
    }

    const int n = z.size();
    const bool zero_mean = std::abs(expectation(z)) <= tol.zero_mean_rel * (1.0 + z.max_abs());
    if (report.rank == 0) {
        report.classification = SpanClass::Zero;
    } else if (report.rank == n && !(n == 1)) {
        report.classification =
            generators.size() == 1 ? SpanClass::ConstantLine : SpanClass::FullSpace;
    } else if (report.rank == 1) {
        report.classification = generators.size() == 1 || n != 2 ? SpanClass::ConstantLine
                                                                 : SpanClass::MeanZeroHyperplane;
    } else if (report.rank == n - 1 && zero_mean) {
        report.classification = SpanClass::MeanZeroHyperplane;
    } else {
        throw std::runtime_error("orbit span rank " + std::to_string(report.rank) +
                                 " inconsistent with the finite dichotomy");
    }
    return report;
}

}  // namespace lawvar

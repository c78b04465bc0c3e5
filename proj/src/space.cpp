#include "lawvar/space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lawvar {

SampleSpace::SampleSpace(int atom_count) : n_(atom_count) {
    if (atom_count < 1) {
        throw std::invalid_argument("sample space needs at least one atom");
    }
}

RandomVariable::RandomVariable(SampleSpace space, std::vector<double> values)
    : space_(space), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != space_.n()) {
        throw std::invalid_argument("value vector length must equal the atom count");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("random variables must have finite entries");
        }
    }
}

RandomVariable RandomVariable::constant(SampleSpace space, double value) {
    return RandomVariable(space, std::vector<double>(space.n(), value));
}

RandomVariable RandomVariable::indicator(SampleSpace space, std::uint64_t mask) {
    std::vector<double> v(space.n(), 0.0);
    for (int i = 0; i < space.n() && i < 64; ++i) {
        if (mask & (std::uint64_t{1} << i)) v[i] = 1.0;
    }
    return RandomVariable(space, std::move(v));
}

RandomVariable RandomVariable::unit(SampleSpace space, int atom) {
    if (atom < 0 || atom >= space.n()) throw std::invalid_argument("atom index out of range");
    std::vector<double> v(space.n(), 0.0);
    v[atom] = 1.0;
    return RandomVariable(space, std::move(v));
}

RandomVariable RandomVariable::prefix_indicator(SampleSpace space, int k) {
    if (k < 0 || k > space.n()) throw std::invalid_argument("prefix length out of range");
    std::vector<double> v(space.n(), 0.0);
    std::fill(v.begin(), v.begin() + k, 1.0);
    return RandomVariable(space, std::move(v));
}

RandomVariable RandomVariable::permuted(const std::vector<int>& perm) const {
    if (static_cast<int>(perm.size()) != size()) {
        throw std::invalid_argument("permutation length must equal the atom count");
    }
    std::vector<double> v(values_.size());
    for (int i = 0; i < size(); ++i) v[i] = values_[perm[i]];
    return RandomVariable(space_, std::move(v));
}

double RandomVariable::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

namespace {

void require_same_space(const RandomVariable& x, const RandomVariable& y) {
    if (x.space() != y.space()) throw std::invalid_argument("space mismatch");
}

}  // namespace

RandomVariable operator+(const RandomVariable& x, const RandomVariable& y) {
    require_same_space(x, y);
    std::vector<double> v(x.values());
    for (int i = 0; i < x.size(); ++i) v[i] += y[i];
    return RandomVariable(x.space(), std::move(v));
}

RandomVariable operator-(const RandomVariable& x, const RandomVariable& y) {
    require_same_space(x, y);
    std::vector<double> v(x.values());
    for (int i = 0; i < x.size(); ++i) v[i] -= y[i];
    return RandomVariable(x.space(), std::move(v));
}

RandomVariable operator-(const RandomVariable& x) { return -1.0 * x; }

RandomVariable operator*(double scale, const RandomVariable& x) {
    std::vector<double> v(x.values());
    for (double& e : v) e *= scale;
    return RandomVariable(x.space(), std::move(v));
}

RandomVariable operator+(const RandomVariable& x, double shift) {
    std::vector<double> v(x.values());
    for (double& e : v) e += shift;
    return RandomVariable(x.space(), std::move(v));
}

double expectation(const RandomVariable& x) {
    std::vector<double> v(x.values());
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double e : v) sum += e;
    return sum / x.size();
}

double inner_expectation(const RandomVariable& x, const RandomVariable& y) {
    require_same_space(x, y);
    double sum = 0.0;
    for (int i = 0; i < x.size(); ++i) sum += x[i] * y[i];
    return sum / x.size();
}

bool same_law(const RandomVariable& x, const RandomVariable& y, double tol) {
    require_same_space(x, y);
    std::vector<double> xs(x.values()), ys(y.values());
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(std::abs(xs[i] - ys[i]) <= tol)) return false;
    }
    return true;
}

bool is_constant(const RandomVariable& x, double tol) {
    if (tol < 0.0) throw std::invalid_argument("tolerance must be nonnegative");
    auto [lo, hi] = std::minmax_element(x.values().begin(), x.values().end());
    return *hi - *lo <= tol;
}

void to_json(nlohmann::json& j, const SampleSpace& space) { j = nlohmann::json{{"n", space.n()}}; }

void to_json(nlohmann::json& j, const RandomVariable& x) { j = x.values(); }

SampleSpace sample_space_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("n") || !j.at("n").is_number_integer()) {
        throw std::invalid_argument("sample space JSON must be an object {\"n\": integer}");
    }
    return SampleSpace(j.at("n").get<int>());
}

RandomVariable random_variable_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) {
        throw std::invalid_argument("random variable JSON must be a nonempty array of numbers");
    }
    std::vector<double> v;
    v.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_number()) throw std::invalid_argument("random variable entries must be numbers");
        v.push_back(e.get<double>());
    }
    SampleSpace space(static_cast<int>(v.size()));
    return RandomVariable(space, std::move(v));
}

}  // namespace lawvar

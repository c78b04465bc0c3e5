#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace lawvar {

/// A finite set of n equiprobable atoms.  Atom weights are always 1/n;
/// non-uniform weights are not representable, which keeps equality in law
/// identical to equality of value multisets.
class SampleSpace {
  public:
    explicit SampleSpace(int atom_count);

    int n() const { return n_; }
    double atom_probability() const { return 1.0 / n_; }

    bool operator==(const SampleSpace&) const = default;

  private:
    int n_;
};

/// A real-valued random variable on a SampleSpace: one finite value per atom.
/// Immutable after construction; all operations are pure.
class RandomVariable {
  public:
    RandomVariable(SampleSpace space, std::vector<double> values);

    static RandomVariable constant(SampleSpace space, double value);
    /// Indicator of the atom set encoded as a bitmask (bit i = atom i);
    /// limited to 64 atoms.
    static RandomVariable indicator(SampleSpace space, std::uint64_t mask);
    /// Indicator of the single atom `atom` (any space size).
    static RandomVariable unit(SampleSpace space, int atom);
    /// Indicator of atoms {0, ..., k-1}.
    static RandomVariable prefix_indicator(SampleSpace space, int k);

    const SampleSpace& space() const { return space_; }
    int size() const { return static_cast<int>(values_.size()); }
    const std::vector<double>& values() const { return values_; }
    double operator[](int atom) const { return values_[atom]; }

    /// Image under a permutation of atoms: result[i] = values[perm[i]].
    RandomVariable permuted(const std::vector<int>& perm) const;

    double max_abs() const;

    bool operator==(const RandomVariable&) const = default;

  private:
    SampleSpace space_;
    std::vector<double> values_;
};

RandomVariable operator+(const RandomVariable& x, const RandomVariable& y);
RandomVariable operator-(const RandomVariable& x, const RandomVariable& y);
RandomVariable operator-(const RandomVariable& x);
RandomVariable operator*(double scale, const RandomVariable& x);
RandomVariable operator+(const RandomVariable& x, double shift);

/// E_P[X] = (1/n) * sum of values.  Summands are accumulated in ascending
/// order, so variables with equal value multisets have bitwise-equal
/// expectations and the result is invariant under permutations of atoms.
double expectation(const RandomVariable& x);

/// (1/n) * sum_i x_i y_i, the dual pairing E_P[XY].
double inner_expectation(const RandomVariable& x, const RandomVariable& y);

/// Equality in law: on uniform atoms, the sorted value vectors agree
/// entrywise within `tol` (exact comparison by default).
bool same_law(const RandomVariable& x, const RandomVariable& y, double tol = 0.0);

bool is_constant(const RandomVariable& x, double tol = 0.0);

void to_json(nlohmann::json& j, const SampleSpace& space);
void to_json(nlohmann::json& j, const RandomVariable& x);

SampleSpace sample_space_from_json(const nlohmann::json& j);
/// Parses a JSON array of numbers; the space is inferred from its length.
RandomVariable random_variable_from_json(const nlohmann::json& j);

}  // namespace lawvar

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "mflab/linalg.hpp"
#include "mflab/spectral.hpp"

namespace mflab {

using Occupation = std::vector<int>;

/// Occupation-number basis over K modes with total particle number in
/// [n_min, n_max]. States are graded by total number; within a total they are
/// ordered descending-lexicographically, so (N,0,...,0) comes first.
class FockBasis {
 public:
  /// Full truncated Fock space: totals 0..n_max.
  FockBasis(int K, int n_max);
  /// Totals n_min..n_max; FockBasis::sector(K, N) is the N-particle sector.
  FockBasis(int K, int n_min, int n_max);
  static FockBasis sector(int K, int N) { return FockBasis(K, N, N); }

  int modes() const { return K_; }
  int n_min() const { return n_min_; }
  int n_max() const { return n_max_; }
  std::size_t dim() const { return totals_.size(); }

  const Occupation& occupation(std::size_t rank) const { return occ_[rank]; }
  int total(std::size_t rank) const { return totals_[rank]; }
  /// Rank of an occupation vector, or nullopt when it lies outside the basis.
  std::optional<std::size_t> rank(const Occupation& occ) const;
  /// [begin, end) rank range of the n-particle sector (empty when outside).
  std::pair<std::size_t, std::size_t> sector_range(int n) const;

  /// Number of occupation vectors of K modes with exactly n particles.
  static std::size_t count(int K, int n);

  /// CSV rows "rank,n_1,...,n_K".
  void write_csv(std::ostream& os) const;

 private:
  int K_;
  int n_min_;
  int n_max_;
  std::vector<Occupation> occ_;
  std::vector<int> totals_;
  std::vector<std::size_t> sector_offset_;  // indexed by total - n_min
};

using FockBasisPtr = std::shared_ptr<const FockBasis>;

/// Amplitudes over a shared, immutable basis.
struct FockVector {
  FockBasisPtr basis;
  CVector amp;

  FockVector() = default;
  FockVector(FockBasisPtr b, CVector a);
  static FockVector zeros(FockBasisPtr b);
  double norm() const { return amp.norm(); }
};

FockVector vacuum(FockBasisPtr basis);
FockVector basis_vector(FockBasisPtr basis, const Occupation& occ);
cplx inner(const FockVector& a, const FockVector& b);

/// Normal-ordered monomial  a*_{c1} ... a*_{ck} chi(N <= M) a_{a1} ... a_{al}.
/// Creators and annihilators are stored sorted (they commute among themselves).
struct Word {
  std::vector<int> creators;
  std::vector<int> annihilators;
  std::optional<int> cutoff;

  Word() = default;
  Word(std::vector<int> c, std::vector<int> a, std::optional<int> m = std::nullopt);
  auto key() const { return std::tie(creators, annihilators, cutoff); }
  bool operator<(const Word& o) const { return key() < o.key(); }
  /// Change in particle number.
  int shift() const { return static_cast<int>(creators.size()) - static_cast<int>(annihilators.size()); }
};

/// Matrix of P * word on range(P): amplitudes mapped outside the basis are dropped.
SparseOp word_matrix(const FockBasis& basis, const Word& w);

/// Linear combination of words, assembled on demand.
class WordSum {
 public:
  void add(const Word& w, cplx coef);
  void add(const WordSum& other, cplx scale = 1.0);
  SparseOp assemble(const FockBasis& basis) const;
  const std::map<Word, cplx>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

 private:
  std::map<Word, cplx> terms_;
};

SparseOp creation_matrix(const FockBasis& basis, const CVector& f);
SparseOp annihilation_matrix(const FockBasis& basis, const CVector& f);
SparseOp number_matrix(const FockBasis& basis);

/// a*(f) v with a*(f) = sum_p f_p a*_p; amplitudes pushed past n_max are dropped.
FockVector apply_creation(const CVector& f, const FockVector& v);
/// a(f) v with a(f) = sum_p conj(f_p) a_p.
FockVector apply_annihilation(const CVector& f, const FockVector& v);
FockVector number_operator(const FockVector& v);
/// <v, (N+1)^j v> / <v, v>. Throws on the zero vector.
double moment(const FockVector& v, int j);
/// <v, N^k v> / <v, v>.
double number_moment(const FockVector& v, int k);

/// dGamma(J) = sum_pq J_pq a*_p a_q. Rejects non-Hermitian J.
SparseOp second_quantization(const FockBasis& basis, const CMatrix& J);

/// W(f) v = exp(a*(f) - a(f)) v with the skew-Hermitian truncated generator
/// (exactly unitary on the truncated space).
FockVector weyl_apply(const CVector& f, const FockVector& v);
/// P W(f) v for v in the truncated space, evaluated through the normal-ordered
/// form exp(-|f|^2/2) exp(a*(f)) exp(-a(f)); exact up to round-off.
FockVector weyl_apply_compressed(const CVector& f, const FockVector& v);
/// P W(f) Omega: the exact coherent amplitudes below the cutoff.
FockVector coherent_state(FockBasisPtr basis, const CVector& f);
/// (a*(f))^N Omega / sqrt(N!) with unit-norm f.
FockVector product_state(FockBasisPtr basis, const CVector& f, int N);

/// sqrt(N!) / (N^{N/2} e^{-N/2}), via log-gamma.
double d_N(int N);

/// Zero every amplitude outside the n-particle sector.
FockVector project_sector(const FockVector& v, int n);
/// Squared norm in each sector 0..n_max.
std::vector<double> sector_populations(const FockVector& v);

std::string to_json(const FockVector& v);

}  // namespace mflab

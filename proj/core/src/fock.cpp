#include "mflab/fock.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "mflab/errors.hpp"

namespace mflab {

namespace {

void enumerate_sector(int K, int n, Occupation& cur, int pos, std::vector<Occupation>& out) {
  if (pos == K - 1) {
    cur[pos] = n;
    out.push_back(cur);
    return;
  }
  for (int v = n; v >= 0; --v) {
    cur[pos] = v;
    enumerate_sector(K, n - v, cur, pos + 1, out);
  }
}

int total_of(const Occupation& occ) {
  int s = 0;
  for (int x : occ) s += x;
  return s;
}

}  // namespace

std::size_t FockBasis::count(int K, int n) {
  if (n < 0 || K < 0) return 0;
  if (K == 0) return n == 0 ? 1 : 0;
  // C(n+K-1, K-1), built incrementally to stay exact
  std::size_t c = 1;
  for (int i = 1; i < K; ++i) c = c * static_cast<std::size_t>(n + i) / static_cast<std::size_t>(i);
  return c;
}

FockBasis::FockBasis(int K, int n_max) : FockBasis(K, 0, n_max) {}

FockBasis::FockBasis(int K, int n_min, int n_max) : K_(K), n_min_(n_min), n_max_(n_max) {
  if (K < 1) throw InvalidArgument("FockBasis: K must be positive");
  if (n_min < 0 || n_max < n_min) throw InvalidArgument("FockBasis: need 0 <= n_min <= n_max");
  std::size_t total = 0;
  for (int n = n_min; n <= n_max; ++n) total += count(K, n);
  if (total > (std::size_t{1} << 26)) throw InvalidArgument("FockBasis: dimension too large");
  occ_.reserve(total);
  Occupation cur(static_cast<std::size_t>(K), 0);
  for (int n = n_min; n <= n_max; ++n) {
    sector_offset_.push_back(occ_.size());
    enumerate_sector(K, n, cur, 0, occ_);
  }
  sector_offset_.push_back(occ_.size());
  totals_.reserve(occ_.size());
  for (const auto& o : occ_) totals_.push_back(total_of(o));
}

std::optional<std::size_t> FockBasis::rank(const Occupation& occ) const {
  if (static_cast<int>(occ.size()) != K_) return std::nullopt;
  int n = 0;
  for (int x : occ) {
    if (x < 0) return std::nullopt;
    n += x;
  }
  if (n < n_min_ || n > n_max_) return std::nullopt;
  std::size_t r = sector_offset_[static_cast<std::size_t>(n - n_min_)];
  int rem = n;
  for (int i = 0; i < K_ - 1; ++i) {
    // sequences whose i-th entry exceeds occ[i] come first
    for (int v = rem; v > occ[static_cast<std::size_t>(i)]; --v) r += count(K_ - i - 1, rem - v);
    rem -= occ[static_cast<std::size_t>(i)];
  }
  return r;
}

std::pair<std::size_t, std::size_t> FockBasis::sector_range(int n) const {
  if (n < n_min_ || n > n_max_) return {0, 0};
  auto i = static_cast<std::size_t>(n - n_min_);
  return {sector_offset_[i], sector_offset_[i + 1]};
}

void FockBasis::write_csv(std::ostream& os) const {
  os << "rank";
  for (int i = 0; i < K_; ++i) os << ",n_" << i;
  os << "\n";
  for (std::size_t r = 0; r < occ_.size(); ++r) {
    os << r;
    for (int x : occ_[r]) os << "," << x;
    os << "\n";
  }
}

FockVector::FockVector(FockBasisPtr b, CVector a) : basis(std::move(b)), amp(std::move(a)) {
  if (!basis) throw InvalidArgument("FockVector: null basis");
  if (static_cast<std::size_t>(amp.size()) != basis->dim()) {
    throw InvalidArgument("FockVector: amplitude length does not match basis dimension");
  }
}

FockVector FockVector::zeros(FockBasisPtr b) {
  CVector a = CVector::Zero(static_cast<Eigen::Index>(b->dim()));
  return FockVector(std::move(b), std::move(a));
}

FockVector basis_vector(FockBasisPtr basis, const Occupation& occ) {
  auto r = basis->rank(occ);
  if (!r) throw InvalidArgument("basis_vector: occupation outside the basis");
  FockVector v = FockVector::zeros(std::move(basis));
  v.amp[static_cast<Eigen::Index>(*r)] = 1.0;
  return v;
}

FockVector vacuum(FockBasisPtr basis) {
  if (basis->n_min() != 0) throw InvalidArgument("vacuum: basis does not contain the zero sector");
  return basis_vector(basis, Occupation(static_cast<std::size_t>(basis->modes()), 0));
}

static void require_same_basis(const FockVector& a, const FockVector& b) {
  if (a.basis != b.basis && !(a.basis->modes() == b.basis->modes() && a.basis->n_min() == b.basis->n_min() &&
                              a.basis->n_max() == b.basis->n_max())) {
    throw InvalidArgument("Fock vectors live on different bases");
  }
}

cplx inner(const FockVector& a, const FockVector& b) {
  require_same_basis(a, b);
  return a.amp.dot(b.amp);
}

Word::Word(std::vector<int> c, std::vector<int> a, std::optional<int> m)
    : creators(std::move(c)), annihilators(std::move(a)), cutoff(m) {
  std::sort(creators.begin(), creators.end());
  std::sort(annihilators.begin(), annihilators.end());
}

namespace {

using Triplet = Eigen::Triplet<cplx>;

void word_triplets(const FockBasis& basis, const Word& w, cplx coef, std::vector<Triplet>& out) {
  const int K = basis.modes();
  for (int m : w.creators)
    if (m < 0 || m >= K) throw InvalidArgument("word: creator mode out of range");
  for (int m : w.annihilators)
    if (m < 0 || m >= K) throw InvalidArgument("word: annihilator mode out of range");
  const int shift = w.shift();
  Occupation occ;
  for (std::size_t j = 0; j < basis.dim(); ++j) {
    int target = basis.total(j) + shift;
    if (target < basis.n_min() || target > basis.n_max()) continue;
    occ = basis.occupation(j);
    double amp = 1.0;
    bool dead = false;
    for (int m : w.annihilators) {
      int& n = occ[static_cast<std::size_t>(m)];
      if (n == 0) {
        dead = true;
        break;
      }
      amp *= std::sqrt(static_cast<double>(n));
      --n;
    }
    if (dead) continue;
    if (w.cutoff && basis.total(j) - static_cast<int>(w.annihilators.size()) > *w.cutoff) continue;
    for (int m : w.creators) {
      int& n = occ[static_cast<std::size_t>(m)];
      ++n;
      amp *= std::sqrt(static_cast<double>(n));
    }
    auto i = basis.rank(occ);
    if (!i) continue;
    out.emplace_back(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(j), coef * amp);
  }
}

SparseOp from_triplets(const FockBasis& basis, const std::vector<Triplet>& trips) {
  auto d = static_cast<Eigen::Index>(basis.dim());
  SparseOp A(d, d);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  return A;
}

}  // namespace

SparseOp word_matrix(const FockBasis& basis, const Word& w) {
  std::vector<Triplet> trips;
  word_triplets(basis, w, 1.0, trips);
  return from_triplets(basis, trips);
}

void WordSum::add(const Word& w, cplx coef) {
  if (coef == cplx(0.0)) return;
  terms_[w] += coef;
}

void WordSum::add(const WordSum& other, cplx scale) {
  for (const auto& [w, c] : other.terms_) add(w, scale * c);
}

SparseOp WordSum::assemble(const FockBasis& basis) const {
  std::vector<Triplet> trips;
  for (const auto& [w, c] : terms_) word_triplets(basis, w, c, trips);
  return from_triplets(basis, trips);
}

static void check_modes(const FockBasis& basis, const CVector& f) {
  if (f.size() != basis.modes()) throw InvalidArgument("mode-coefficient vector length must equal K");
  if (!f.allFinite()) throw InvalidArgument("mode-coefficient vector is not finite");
}

SparseOp creation_matrix(const FockBasis& basis, const CVector& f) {
  check_modes(basis, f);
  WordSum s;
  for (int p = 0; p < basis.modes(); ++p) s.add(Word({p}, {}), f[p]);
  return s.assemble(basis);
}

SparseOp annihilation_matrix(const FockBasis& basis, const CVector& f) {
  check_modes(basis, f);
  WordSum s;
  for (int p = 0; p < basis.modes(); ++p) s.add(Word({}, {p}), std::conj(f[p]));
  return s.assemble(basis);
}

SparseOp number_matrix(const FockBasis& basis) {
  auto d = static_cast<Eigen::Index>(basis.dim());
  SparseOp A(d, d);
  std::vector<Triplet> trips;
  for (std::size_t j = 0; j < basis.dim(); ++j) {
    auto jj = static_cast<Eigen::Index>(j);
    trips.emplace_back(jj, jj, static_cast<double>(basis.total(j)));
  }
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

FockVector apply_creation(const CVector& f, const FockVector& v) {
  return FockVector(v.basis, creation_matrix(*v.basis, f) * v.amp);
}

FockVector apply_annihilation(const CVector& f, const FockVector& v) {
  return FockVector(v.basis, annihilation_matrix(*v.basis, f) * v.amp);
}

FockVector number_operator(const FockVector& v) {
  FockVector out = v;
  for (std::size_t i = 0; i < v.basis->dim(); ++i) out.amp[static_cast<Eigen::Index>(i)] *= v.basis->total(i);
  return out;
}

static double weighted_moment(const FockVector& v, int j, double offset) {
  if (j < 0) throw InvalidArgument("moment: j must be nonnegative");
  double den = v.amp.squaredNorm();
  if (!(den > 0.0)) throw InvalidArgument("moment: zero vector");
  double num = 0.0;
  for (std::size_t i = 0; i < v.basis->dim(); ++i) {
    num += std::norm(v.amp[static_cast<Eigen::Index>(i)]) * std::pow(v.basis->total(i) + offset, j);
  }
  return num / den;
}

double moment(const FockVector& v, int j) { return weighted_moment(v, j, 1.0); }
double number_moment(const FockVector& v, int k) { return weighted_moment(v, k, 0.0); }

SparseOp second_quantization(const FockBasis& basis, const CMatrix& J) {
  if (J.rows() != basis.modes() || J.cols() != basis.modes()) {
    throw InvalidArgument("second_quantization: J must be K x K");
  }
  double scale = std::max(1.0, J.cwiseAbs().maxCoeff());
  if (hermiticity_residual(J) > 1e-12 * scale) throw InvalidArgument("second_quantization: J is not Hermitian");
  WordSum s;
  for (int p = 0; p < basis.modes(); ++p)
    for (int q = 0; q < basis.modes(); ++q) s.add(Word({p}, {q}), J(p, q));
  return s.assemble(basis);
}

static void require_full_space(const FockVector& v, const char* who) {
  if (v.basis->n_min() != 0) throw InvalidArgument(std::string(who) + ": basis must start at the vacuum sector");
}

FockVector weyl_apply(const CVector& f, const FockVector& v) {
  require_full_space(v, "weyl_apply");
  if (f.norm() == 0.0) return v;
  SparseOp A = creation_matrix(*v.basis, f) - annihilation_matrix(*v.basis, f);
  return FockVector(v.basis, expm_multiply(A, v.amp, 1.0));
}

FockVector weyl_apply_compressed(const CVector& f, const FockVector& v) {
  require_full_space(v, "weyl_apply_compressed");
  if (f.norm() == 0.0) return v;
  const int steps = v.basis->n_max() + 1;
  SparseOp a = annihilation_matrix(*v.basis, f);
  CVector term = v.amp;
  CVector w = term;
  for (int k = 1; k <= steps; ++k) {
    term = (a * term) * (-1.0 / k);
    w += term;
  }
  SparseOp c = creation_matrix(*v.basis, f);
  term = w;
  CVector out = term;
  for (int k = 1; k <= steps; ++k) {
    term = (c * term) * (1.0 / k);
    out += term;
  }
  out *= std::exp(-0.5 * f.squaredNorm());
  return FockVector(v.basis, out);
}

FockVector coherent_state(FockBasisPtr basis, const CVector& f) {
  return weyl_apply_compressed(f, vacuum(std::move(basis)));
}

FockVector product_state(FockBasisPtr basis, const CVector& f, int N) {
  check_modes(*basis, f);
  if (std::abs(f.norm() - 1.0) > 1e-12) throw InvalidArgument("product_state: profile must have unit norm");
  auto [b, e] = basis->sector_range(N);
  if (b == e) throw InvalidArgument("product_state: N outside the basis");
  FockVector v = FockVector::zeros(basis);
  const double lg = std::lgamma(N + 1.0);
  for (std::size_t r = b; r < e; ++r) {
    const auto& occ = basis->occupation(r);
    double lw = lg;
    cplx prod = 1.0;
    for (int p = 0; p < basis->modes(); ++p) {
      int n = occ[static_cast<std::size_t>(p)];
      lw -= std::lgamma(n + 1.0);
      for (int i = 0; i < n; ++i) prod *= f[p];
    }
    v.amp[static_cast<Eigen::Index>(r)] = std::exp(0.5 * lw) * prod;
  }
  return v;
}

double d_N(int N) {
  if (N < 1) throw InvalidArgument("d_N: N must be positive");
  double n = N;
  return std::exp(0.5 * std::lgamma(n + 1.0) - 0.5 * n * std::log(n) + 0.5 * n);
}

FockVector project_sector(const FockVector& v, int n) {
  if (n < 0 || n > v.basis->n_max()) throw InvalidArgument("project_sector: n out of range");
  FockVector out = FockVector::zeros(v.basis);
  auto [b, e] = v.basis->sector_range(n);
  auto bi = static_cast<Eigen::Index>(b);
  auto len = static_cast<Eigen::Index>(e - b);
  out.amp.segment(bi, len) = v.amp.segment(bi, len);
  return out;
}

std::vector<double> sector_populations(const FockVector& v) {
  std::vector<double> pop(static_cast<std::size_t>(v.basis->n_max() + 1), 0.0);
  for (std::size_t i = 0; i < v.basis->dim(); ++i) {
    pop[static_cast<std::size_t>(v.basis->total(i))] += std::norm(v.amp[static_cast<Eigen::Index>(i)]);
  }
  return pop;
}

std::string to_json(const FockVector& v) {
  nlohmann::json j;
  j["K"] = v.basis->modes();
  j["n_min"] = v.basis->n_min();
  j["n_max"] = v.basis->n_max();
  auto arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.amp.size(); ++i) arr.push_back({v.amp[i].real(), v.amp[i].imag()});
  j["amplitudes"] = std::move(arr);
  return j.dump();
}

}  // namespace mflab

#include "freeprob/brown.hpp"

#include <cmath>

#include "freeprob/errors.hpp"
#include "freeprob/limits.hpp"

namespace freeprob {

RationalMatrix RationalMatrix::identity(int n) {
  RationalMatrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RationalMatrix RationalMatrix::unit(int n, int j, int k) {
  RationalMatrix m(n);
  m(j - 1, k - 1) = 1;
  return m;
}

bool RationalMatrix::is_zero() const {
  for (const auto& x : a_)
    if (sgn(x) != 0) return false;
  return true;
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix t(n_);
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

std::string RationalMatrix::to_string() const {
  std::string out = "[";
  for (int r = 0; r < n_; ++r) {
    if (r) out += "; ";
    for (int c = 0; c < n_; ++c) {
      if (c) out += " ";
      out += freeprob::to_string((*this)(r, c));
    }
  }
  return out + "]";
}

RationalMatrix& RationalMatrix::operator+=(const RationalMatrix& o) {
  if (o.n_ != n_) throw DomainError("matrix size mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

RationalMatrix& RationalMatrix::operator-=(const RationalMatrix& o) {
  if (o.n_ != n_) throw DomainError("matrix size mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
  return *this;
}

RationalMatrix& RationalMatrix::operator*=(const Rational& c) {
  for (auto& x : a_) x *= c;
  return *this;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.n_ != b.n_) throw DomainError("matrix size mismatch");
  RationalMatrix out(a.n_);
  for (int r = 0; r < a.n_; ++r)
    for (int k = 0; k < a.n_; ++k) {
      if (sgn(a(r, k)) == 0) continue;
      for (int c = 0; c < a.n_; ++c) out(r, c) += a(r, k) * b(k, c);
    }
  return out;
}

ComplexMatrix haar_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix g(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) g(r, c) = {gauss(rng), gauss(rng)};
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix& r = qr.matrixQR();
  for (int c = 0; c < n; ++c) {
    const std::complex<double> d = r(c, c);
    q.col(c) *= d / std::abs(d);
  }
  return q;
}

namespace {

// (row, col) of the matrix entry a letter stands for, with the star
// convention (u*)_{ij} = u*_{ji}
struct Entry {
  int row;
  int col;
  bool starred;
};

Entry entry_of(int j, int k, bool starred) { return starred ? Entry{k, j, true} : Entry{j, k, false}; }

bool cyclic_alternating(const std::vector<Entry>& e) {
  const std::size_t m = e.size();
  if (m == 0 || m % 2 == 1) return false;
  for (std::size_t i = 0; i + 1 < m; ++i)
    if (e[i].starred == e[i + 1].starred) return false;
  if (e[0].row != e[m - 1].col) return false;
  for (std::size_t i = 1; i < m; ++i)
    if (e[i].row != e[i - 1].col) return false;
  return true;
}

Rational closed_form(int n, int m) {
  // n^{1-m} (-1)^{m/2-1} C_{m/2-1}
  Integer denominator;
  mpz_ui_pow_ui(denominator.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(m - 1));
  Rational v(signed_catalan(m / 2), denominator);
  v.canonicalize();
  return v;
}

constexpr int kMaxHaarLength = 32;

}  // namespace

HaarCumulants::HaarCumulants(const BrownContext& ctx)
    : n_(ctx.n()), letters_(ctx.generators()), value_(kMaxHaarLength + 1) {
  for (int m = 2; m <= kMaxHaarLength; m += 2) value_[m] = closed_form(n_, m);
}

const Rational& HaarCumulants::cumulant(std::span<const int> symbols) const {
  static const Rational zero = 0;
  const std::size_t m = symbols.size();
  if (m > static_cast<std::size_t>(kMaxHaarLength)) throw CapError("Haar cumulant order beyond the supported length");
  if (m % 2 == 1) return zero;
  std::vector<Entry> e;
  e.reserve(m);
  for (int s : symbols) {
    const int p = s / 2;
    e.push_back(entry_of(p / n_ + 1, p % n_ + 1, s % 2 == 1));
  }
  return cyclic_alternating(e) ? value_[m] : zero;
}

BrownContext::BrownContext(int n, std::string alphabet)
    : n_(n), alphabet_(std::move(alphabet)) {
  if (n < 1) throw DomainError("Brown algebra needs n >= 1");
  generators_ = LetterSet::matrix(alphabet_, n);
}

NCPolynomial BrownContext::row_relation(int j, int k) const {
  NCPolynomial p;
  for (int l = 1; l <= n_; ++l) p.add_term(Word({generator(j, l), generator(k, l, true)}), 1);
  return p;
}

NCPolynomial BrownContext::column_relation(int j, int k) const {
  NCPolynomial p;
  for (int l = 1; l <= n_; ++l) p.add_term(Word({generator(l, j, true), generator(l, k)}), 1);
  return p;
}

std::vector<NCPolynomial> BrownContext::relations() const {
  std::vector<NCPolynomial> out;
  for (int j = 1; j <= n_; ++j)
    for (int k = 1; k <= n_; ++k) {
      const Rational d = j == k ? 1 : 0;
      out.push_back(row_relation(j, k) - NCPolynomial(d));
      out.push_back(column_relation(j, k) - NCPolynomial(d));
    }
  return out;
}

Rational BrownContext::haar_cumulant(const Word& w) const {
  std::vector<Entry> e;
  for (const auto& l : w) {
    if (!is_generator(l)) throw DomainError("letter " + l.to_string() + " is not a generator of the Brown algebra");
    e.push_back(entry_of(l.index[0], l.index[1], l.starred));
  }
  if (w.empty()) return 1;
  return cyclic_alternating(e) ? closed_form(n_, static_cast<int>(w.size())) : Rational(0);
}

std::shared_ptr<const HaarCumulants> BrownContext::cumulant_source() const {
  return std::make_shared<HaarCumulants>(*this);
}

Rational BrownContext::haar_moment(const Word& w) const {
  const int cap = engine_limits().max_partition_size;
  if (static_cast<int>(w.size()) > cap)
    throw CapError("word of length " + std::to_string(w.size()) + " beyond the partition cap " + std::to_string(cap));
  FreeProductEvaluator eval({cumulant_source()});
  return eval.evaluate(w);
}

MomentFunctional BrownContext::as_moment_functional(int degree) const {
  const int cap = engine_limits().max_partition_size;
  if (degree > cap) throw CapError("degree " + std::to_string(degree) + " beyond the partition cap " + std::to_string(cap));
  WordTable kappa(generators_, degree);
  HaarCumulants source(*this);
  for_each_word(kappa, [&](int m, std::uint64_t code, const std::vector<int>& symbols) {
    kappa.at(m, code) = source.cumulant(symbols);
  });
  return moments_from_cumulants(CumulantTable(std::move(kappa)), true);
}

NCPolynomial BrownContext::structure_map(StructureMap which, const Letter& l) const {
  if (!is_generator(l)) throw DomainError("letter " + l.to_string() + " is not a generator of the Brown algebra");
  const int j = l.index[0];
  const int k = l.index[1];
  NCPolynomial image;
  switch (which) {
    case StructureMap::coproduct:
      for (int m = 1; m <= n_; ++m)
        image.add_term(Word({Letter::make(copy_alphabet(1), j, m), Letter::make(copy_alphabet(2), m, k)}), 1);
      break;
    case StructureMap::counit:
      image = NCPolynomial(j == k ? 1 : 0);
      break;
    case StructureMap::coinverse:
      image = NCPolynomial::letter(generator(k, j, true));
      break;
  }
  return l.starred ? image.adjoint() : image;
}

NCPolynomial BrownContext::apply(StructureMap which, const NCPolynomial& p) const {
  return substitute(p, [&](const Letter& l) -> std::optional<NCPolynomial> {
    if (!is_generator(l)) return std::nullopt;
    return structure_map(which, l);
  });
}

MatrixImage BrownContext::pi_rep_formal(const NCPolynomial& p) const {
  MatrixImage out;
  for (const auto& [w, c] : p.terms()) {
    // a product of matrix units is a matrix unit or zero
    int first_row = -1;
    int last_col = -1;
    bool zero = false;
    Word formal;
    for (const auto& l : w) {
      if (!is_generator(l)) {
        formal.push_back(l);
        continue;
      }
      // π(u_{jk}) = e_{kj}, π(u*_{jk}) = e_{jk}
      const int r = l.starred ? l.index[0] : l.index[1];
      const int col = l.starred ? l.index[1] : l.index[0];
      if (first_row < 0) {
        first_row = r;
      } else if (last_col != r) {
        zero = true;
        break;
      }
      last_col = col;
    }
    if (zero) continue;
    RationalMatrix m = first_row < 0 ? RationalMatrix::identity(n_) : RationalMatrix::unit(n_, first_row, last_col);
    m *= c;
    auto it = out.find(formal);
    if (it == out.end())
      out.emplace(formal, std::move(m));
    else
      it->second += m;
  }
  for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

RationalMatrix BrownContext::pi_rep(const NCPolynomial& p) const {
  for (const auto& [w, c] : p.terms())
    for (const auto& l : w)
      if (!is_generator(l)) throw DomainError("letter " + l.to_string() + " is not a generator of the Brown algebra");
  auto image = pi_rep_formal(p);
  auto it = image.find(Word{});
  return it == image.end() ? RationalMatrix(n_) : it->second;
}

namespace {

void require_unitary(const ComplexMatrix& u, int n) {
  if (u.rows() != n || u.cols() != n) throw DomainError("unitary of the wrong size");
  const double err = (u.adjoint() * u - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (err > 1e-12) throw DomainError("matrix is not unitary to 1e-12");
}

}  // namespace

ScalarImage BrownContext::unitary_eval_formal(const NCPolynomial& p,
                                              const std::map<std::string, ComplexMatrix>& unitaries) const {
  for (const auto& [name, u] : unitaries) require_unitary(u, n_);
  ScalarImage out;
  for (const auto& [w, c] : p.terms()) {
    std::complex<double> v = c.get_d();
    Word formal;
    for (const auto& l : w) {
      auto it = l.arity == 2 ? unitaries.find(l.alphabet) : unitaries.end();
      if (it == unitaries.end()) {
        formal.push_back(l);
        continue;
      }
      if (l.index[0] > n_ || l.index[1] > n_) throw DomainError("index out of range in " + l.to_string());
      const std::complex<double> x = it->second(l.index[0] - 1, l.index[1] - 1);
      v *= l.starred ? std::conj(x) : x;
    }
    out[formal] += v;
  }
  return out;
}

std::complex<double> BrownContext::unitary_eval(const NCPolynomial& p, const ComplexMatrix& U) const {
  for (const auto& [w, c] : p.terms())
    for (const auto& l : w)
      if (!is_generator(l)) throw DomainError("letter " + l.to_string() + " is not a generator of the Brown algebra");
  auto image = unitary_eval_formal(p, {{alphabet_, U}});
  auto it = image.find(Word{});
  return it == image.end() ? std::complex<double>{} : it->second;
}

RepVerdict BrownContext::rep_equality(const NCPolynomial& p, const NCPolynomial& q, int trials,
                                      std::uint64_t seed) const {
  const NCPolynomial d = p - q;
  RepVerdict v;
  auto exact = pi_rep_formal(d);
  if (!exact.empty()) {
    v.distinguished = true;
    v.witness = "pi_" + std::to_string(n_);
    v.detail = exact.begin()->first.to_string() + " -> " + exact.begin()->second.to_string();
    return v;
  }
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    auto image = unitary_eval_formal(d, {{alphabet_, haar_unitary(n_, rng)}});
    for (const auto& [w, x] : image)
      if (std::abs(x) > 1e-9) {
        v.distinguished = true;
        v.witness = "unitary trial " + std::to_string(t + 1);
        v.detail = w.to_string() + " -> |" + std::to_string(std::abs(x)) + "|";
        return v;
      }
  }
  return v;
}

}  // namespace freeprob

#include "xxzdm/mps.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>

namespace xxzdm {

namespace {

constexpr double kMoveCutoff = 1e-14;  // drops exact zero modes only

Index bounded_pow(Index base, int exp, Index cap) {
  Index v = 1;
  for (int i = 0; i < exp; ++i) {
    v *= base;
    if (v >= cap) return cap;
  }
  return v;
}

}  // namespace

Index MpsState::bond_dim(int l) const {
  if (l == 0) return tensors.front().dim(0);
  return tensors[static_cast<std::size_t>(l - 1)].dim(2);
}

Index MpsState::max_bond_dim() const {
  Index m = 1;
  for (const auto& t : tensors) m = std::max(m, t.dim(2));
  return m;
}

void MpsState::validate() const {
  if (tensors.empty()) throw ShapeError("empty MPS");
  if (tensors.front().dim(0) != 1 || tensors.back().dim(2) != 1)
    throw ShapeError("MPS boundary bonds must have dimension 1");
  for (int l = 1; l <= length(); ++l) {
    const Tensor& t = site(l);
    if (t.rank() != 3) throw ShapeError("MPS tensors must be rank 3");
    if (t.dim(1) != phys_dim) throw ShapeError("MPS physical dimension mismatch");
    if (l < length() && t.dim(2) != site(l + 1).dim(0))
      throw ShapeError("adjacent MPS bond dimensions do not match");
  }
}

namespace detail {

double move_center_right(MpsState& psi, int k, Index chi_max, double cutoff) {
  Tensor& t = psi.site(k);
  const Index a = t.dim(0), d = t.dim(1), b = t.dim(2);
  auto svd = svd_truncate(Tensor(t).reshaped({a * d, b}), chi_max, cutoff);
  if (svd.s.empty()) throw NumericError("zero tensor in canonical move");
  const Index r = static_cast<Index>(svd.s.size());
  t = std::move(svd.u).reshaped({a, d, r});

  Tensor c({r, b});
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < b; ++j)
      c.at({i, j}) = svd.s[static_cast<std::size_t>(i)] * svd.vdag.at({i, j});
  psi.site(k + 1) = contract(c, psi.site(k + 1), {{1, 0}});
  if (psi.form != CanonicalForm::None && psi.center == k) {
    psi.center = k + 1;
    psi.form = CanonicalForm::Mixed;
  }
  return svd.discarded_weight;
}

double move_center_left(MpsState& psi, int k, Index chi_max, double cutoff) {
  Tensor& t = psi.site(k);
  const Index a = t.dim(0), d = t.dim(1), b = t.dim(2);
  auto svd = svd_truncate(Tensor(t).reshaped({a, d * b}), chi_max, cutoff);
  if (svd.s.empty()) throw NumericError("zero tensor in canonical move");
  const Index r = static_cast<Index>(svd.s.size());
  t = std::move(svd.vdag).reshaped({r, d, b});

  Tensor c({a, r});
  for (Index i = 0; i < a; ++i)
    for (Index j = 0; j < r; ++j)
      c.at({i, j}) = svd.u.at({i, j}) * svd.s[static_cast<std::size_t>(j)];
  psi.site(k - 1) = contract(psi.site(k - 1), c, {{2, 0}});
  if (psi.form != CanonicalForm::None && psi.center == k) {
    psi.center = k - 1;
    psi.form = CanonicalForm::Mixed;
  }
  return svd.discarded_weight;
}

double canonicalize(MpsState& psi, int k, Index chi_max, double cutoff) {
  const int L = psi.length();
  if (k < 1 || k > L) throw ShapeError("orthogonal center out of range");
  double discarded = 0.0;
  if (psi.form == CanonicalForm::None) {
    for (int l = 1; l < k; ++l) discarded += move_center_right(psi, l, chi_max, cutoff);
    for (int l = L; l > k; --l) discarded += move_center_left(psi, l, chi_max, cutoff);
  } else {
    for (int l = psi.center; l < k; ++l)
      discarded += move_center_right(psi, l, chi_max, cutoff);
    for (int l = psi.center; l > k; --l)
      discarded += move_center_left(psi, l, chi_max, cutoff);
  }
  psi.center = k;
  psi.form = CanonicalForm::Mixed;
  return discarded;
}

void normalize_center(MpsState& psi) {
  if (psi.form == CanonicalForm::None)
    throw ShapeError("normalize_center requires a canonical form");
  Tensor& t = psi.site(psi.center);
  const double n = t.frobenius_norm();
  if (n == 0.0) throw NumericError("cannot normalize a zero state");
  t = t.scaled(cplx(1.0 / n, 0.0));
}

}  // namespace detail

MpsState from_dense_vector(const std::vector<cplx>& c, Index chi_max, int phys_dim,
                           double* discarded_weight) {
  if (phys_dim < 2) throw ShapeError("phys_dim must be >= 2");
  const Index d = phys_dim;
  Index n = static_cast<Index>(c.size());
  int L = 0;
  while (n > 1 && n % d == 0) {
    n /= d;
    ++L;
  }
  if (n != 1 || L < 1)
    throw ShapeError("dense vector length is not an exact power of phys_dim");

  MpsState psi;
  psi.phys_dim = phys_dim;
  double discarded = 0.0;

  Tensor rest({static_cast<Index>(c.size())}, c);
  Index left = 1;
  Index remaining = static_cast<Index>(c.size());
  for (int l = 1; l < L; ++l) {
    remaining /= d;
    auto svd =
        svd_truncate(std::move(rest).reshaped({left * d, remaining}), chi_max, kMoveCutoff);
    if (svd.s.empty()) throw NumericError("zero dense vector");
    const Index r = static_cast<Index>(svd.s.size());
    discarded += svd.discarded_weight;
    psi.tensors.push_back(std::move(svd.u).reshaped({left, d, r}));
    rest = Tensor({r, remaining});
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < remaining; ++j)
        rest.at({i, j}) = svd.s[static_cast<std::size_t>(i)] * svd.vdag.at({i, j});
    left = r;
  }
  psi.tensors.push_back(std::move(rest).reshaped({left, d, 1}));

  psi.form = CanonicalForm::Left;
  psi.center = L;
  if (discarded_weight) *discarded_weight = discarded;
  return psi;
}

MpsState random_mps(int length, int phys_dim, Index chi_max, std::uint64_t seed) {
  if (length < 2) throw ShapeError("random_mps requires length >= 2");
  if (phys_dim < 2 || chi_max < 1) throw ShapeError("invalid phys_dim or chi_max");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  MpsState psi;
  psi.phys_dim = phys_dim;
  Index left = 1;
  for (int l = 1; l <= length; ++l) {
    const Index right =
        (l == length) ? 1
                      : std::min(chi_max, bounded_pow(phys_dim, std::min(l, length - l),
                                                      chi_max + 1));
    Tensor t({left, phys_dim, right});
    for (Index i = 0; i < t.size(); ++i) t.data()[i] = cplx(gauss(rng), gauss(rng));
    psi.tensors.push_back(std::move(t));
    left = right;
  }
  detail::canonicalize(psi, 1, chi_max, kMoveCutoff);
  detail::normalize_center(psi);
  psi.form = CanonicalForm::Right;
  return psi;
}

MpsState shift_center(const MpsState& psi, int k) {
  if (k < 1 || k > psi.length()) throw ShapeError("shift_center: site out of range");
  MpsState out = psi;
  // no chi cap here: bond dimensions cannot grow during a canonical move
  detail::canonicalize(out, k, std::numeric_limits<Index>::max() / 4, kMoveCutoff);
  return out;
}

double norm(const MpsState& psi) {
  if (psi.form == CanonicalForm::None) {
    return std::sqrt(std::abs(overlap(psi, psi)));
  }
  return psi.site(psi.center).frobenius_norm();
}

cplx overlap(const MpsState& phi, const MpsState& psi) {
  if (phi.length() != psi.length() || phi.phys_dim != psi.phys_dim)
    throw ShapeError("overlap: states have different length or physical dimension");
  Tensor t({1, 1});
  t.at({0, 0}) = cplx(1.0, 0.0);
  for (int l = 1; l <= psi.length(); ++l) {
    // (a, a') -> (b, b'): bra index first
    Tensor step = contract(t, psi.site(l), {{1, 0}});              // (a, d, b')
    t = contract(phi.site(l).conjugated(), step, {{0, 0}, {1, 1}});  // (b, b')
  }
  return t.at({0, 0});
}

std::vector<cplx> to_dense(const MpsState& psi) {
  const int L = psi.length();
  if (L > 20) throw ShapeError("to_dense is limited to L <= 20");
  Tensor v = Tensor(psi.site(1)).reshaped({psi.phys_dim, psi.site(1).dim(2)});
  for (int l = 2; l <= L; ++l) {
    Tensor next = contract(v, psi.site(l), {{1, 0}});  // (D, d, b)
    const Index big = next.dim(0) * next.dim(1);
    const Index right = next.dim(2);
    v = std::move(next).reshaped({big, right});
  }
  std::vector<cplx> out(v.storage());
  return out;
}

namespace {

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw NumericError("truncated MPS checkpoint");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw NumericError("truncated MPS checkpoint");
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

constexpr std::uint32_t kMpsMagic = 0x4350534d;  // "MPSC"
constexpr std::uint32_t kMpsVersion = 1;

}  // namespace

void save_mps(const MpsState& psi, const std::string& path) {
  std::string buf;
  put_u32(buf, kMpsMagic);
  put_u32(buf, kMpsVersion);
  put_u32(buf, static_cast<std::uint32_t>(psi.length()));
  put_u32(buf, static_cast<std::uint32_t>(psi.phys_dim));
  put_u32(buf, static_cast<std::uint32_t>(psi.form));
  put_u32(buf, static_cast<std::uint32_t>(psi.center < 0 ? 0 : psi.center));
  for (const auto& t : psi.tensors) {
    put_u32(buf, static_cast<std::uint32_t>(t.dim(0)));
    put_u32(buf, static_cast<std::uint32_t>(t.dim(1)));
    put_u32(buf, static_cast<std::uint32_t>(t.dim(2)));
    for (Index i = 0; i < t.size(); ++i) {
      put_u64(buf, std::bit_cast<std::uint64_t>(t.data()[i].real()));
      put_u64(buf, std::bit_cast<std::uint64_t>(t.data()[i].imag()));
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw NumericError("cannot open " + path + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw NumericError("failed writing " + path);
}

MpsState load_mps(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NumericError("cannot open " + path);
  if (get_u32(in) != kMpsMagic) throw NumericError(path + " is not an MPS checkpoint");
  if (get_u32(in) != kMpsVersion) throw NumericError("unsupported MPS checkpoint version");
  const int L = static_cast<int>(get_u32(in));
  MpsState psi;
  psi.phys_dim = static_cast<int>(get_u32(in));
  psi.form = static_cast<CanonicalForm>(get_u32(in));
  const int center = static_cast<int>(get_u32(in));
  psi.center = (psi.form == CanonicalForm::None) ? -1 : center;
  for (int l = 0; l < L; ++l) {
    const Index a = get_u32(in), d = get_u32(in), b = get_u32(in);
    Tensor t({a, d, b});
    for (Index i = 0; i < t.size(); ++i) {
      const double re = std::bit_cast<double>(get_u64(in));
      const double im = std::bit_cast<double>(get_u64(in));
      t.data()[i] = cplx(re, im);
    }
    psi.tensors.push_back(std::move(t));
  }
  psi.validate();
  return psi;
}

bool is_left_normalized(const Tensor& t, double tol) {
  Tensor g = contract(t.conjugated(), t, {{0, 0}, {1, 1}});  // (b, b')
  for (Index i = 0; i < g.dim(0); ++i)
    for (Index j = 0; j < g.dim(1); ++j) {
      const cplx want = (i == j) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
      if (std::abs(g.at({i, j}) - want) > tol) return false;
    }
  return true;
}

bool is_right_normalized(const Tensor& t, double tol) {
  Tensor g = contract(t, t.conjugated(), {{1, 1}, {2, 2}});  // (a, a')
  for (Index i = 0; i < g.dim(0); ++i)
    for (Index j = 0; j < g.dim(1); ++j) {
      const cplx want = (i == j) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
      if (std::abs(g.at({i, j}) - want) > tol) return false;
    }
  return true;
}

bool check_canonical(const MpsState& psi, double tol) {
  if (psi.form == CanonicalForm::None) return true;
  const int L = psi.length();
  int k = psi.center;
  if (psi.form == CanonicalForm::Left) k = L;
  if (psi.form == CanonicalForm::Right) k = 1;
  for (int l = 1; l < k; ++l)
    if (!is_left_normalized(psi.site(l), tol)) return false;
  for (int l = k + 1; l <= L; ++l)
    if (!is_right_normalized(psi.site(l), tol)) return false;
  return true;
}

}  // namespace xxzdm

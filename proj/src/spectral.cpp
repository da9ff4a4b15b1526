#include "deblur/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>

namespace deblur {

SpectralCache build_spectral_cache(const Psf& psf, const ImageGrid& y) {
  if (y.width != y.height)
    throw DomainError("build_spectral_cache: periodic model requires a square image");
  const int p = y.width;
  ForwardModel model = ForwardModel::periodic(psf, p);

  SpectralCache c;
  c.width = c.height = p;
  c.n = p * p;
  c.ahat = model.spectrum();
  c.lhat = laplacian_spectrum(p, p);
  c.yhat = dft2(y);
  c.ydoty = dot(y, y);

  double amax = 0.0;
  for (const auto& v : c.ahat) amax = std::max(amax, std::abs(v));
  const double flag_tol = 1e-12 * amax;

  std::vector<int> keep;
  keep.reserve(c.n);
  for (int i = 0; i < c.n; ++i) {
    const double amod = std::abs(c.ahat[i]);
    if (amod <= flag_tol) {
      c.flagged.push_back(i);
      c.flagged_w.push_back(std::norm(c.yhat[i]) / c.n);
    } else {
      keep.push_back(i);
    }
  }

  c.perm = keep;
  std::stable_sort(c.perm.begin(), c.perm.end(), [&c](int i, int j) {
    const double zi = c.lhat[i] / std::norm(c.ahat[i]);
    const double zj = c.lhat[j] / std::norm(c.ahat[j]);
    return zi < zj;
  });

  c.z.resize(c.perm.size());
  c.w.resize(c.perm.size());
  c.a = 0.0;
  for (size_t k = 0; k < c.perm.size(); ++k) {
    const int i = c.perm[k];
    const double a2 = std::norm(c.ahat[i]);
    c.z[k] = c.lhat[i] / a2;
    c.w[k] = std::norm(c.yhat[i]) / c.n;
    c.a += std::log(a2);
  }
  // The periodic Laplacian has an exact zero at DC; treat anything at
  // roundoff scale as zero so the power sums stay clean.
  const double ztiny = 1e-14;
  c.zero_count = 0;
  for (double& zv : c.z) {
    if (zv <= ztiny) {
      zv = std::max(zv, 0.0);
      if (zv < ztiny) zv = 0.0;
      ++c.zero_count;
    } else {
      break;
    }
  }
  return c;
}

CumulantTables build_cumulant_tables(const SpectralCache& cache, int s) {
  if (s < 1) throw DomainError("build_cumulant_tables: order s must be >= 1");
  CumulantTables t;
  t.s = s;
  t.n = static_cast<int>(cache.z.size());
  const int n = t.n;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  t.S.assign(s + 1, std::vector<double>(n + 2, 0.0));
  t.U.assign(s + 1, std::vector<double>(n + 2, 0.0));
  t.T.assign(s + 1, std::vector<double>(n + 2, 0.0));
  t.V.assign(s + 1, std::vector<double>(n + 2, 0.0));
  t.b.assign(n + 2, 0.0);

  // Prefix sums (columns are 1-based; column 0 is the empty head).
  for (int r = 1; r <= s; ++r) {
    double accS = 0.0, accU = 0.0;
    for (int q = 1; q <= n; ++q) {
      const double zp = std::pow(cache.z[q - 1], r);
      accS += cache.w[q - 1] * zp;
      accU += zp;
      t.S[r][q] = accS;
      t.U[r][q] = accU;
    }
  }
  // Suffix sums; column n+1 is the empty tail. Z = 0 entries poison all
  // earlier columns, which the band selection never touches.
  {
    double accT0 = 0.0;
    for (int q = n; q >= 1; --q) {
      accT0 += cache.w[q - 1];
      t.T[0][q] = accT0;
    }
  }
  for (int r = 1; r <= s; ++r) {
    double accT = 0.0, accV = 0.0;
    for (int q = n; q >= 1; --q) {
      const double zq = cache.z[q - 1];
      if (zq <= 0.0) {
        for (int qq = q; qq >= 1; --qq) {
          t.T[r][qq] = nan;
          t.V[r][qq] = nan;
        }
        break;
      }
      const double zp = std::pow(zq, -static_cast<double>(r));
      accT += cache.w[q - 1] * zp;
      accV += zp;
      t.T[r][q] = accT;
      t.V[r][q] = accV;
    }
  }
  {
    double accB = 0.0;
    for (int q = n; q >= 1; --q) {
      const double zq = cache.z[q - 1];
      if (zq <= 0.0) {
        for (int qq = q; qq >= 1; --qq) t.b[qq] = nan;
        break;
      }
      accB += std::log(zq);
      t.b[q] = accB;
    }
  }
  return t;
}

double f_direct(const SpectralCache& cache, double lambda) {
  if (lambda < 0.0) throw DomainError("f_direct: lambda must be nonnegative");
  double s = 0.0;
  for (size_t i = 0; i < cache.z.size(); ++i) {
    const double lz = lambda * cache.z[i];
    if (lz > 0.0) s += cache.w[i] * lz / (1.0 + lz);
  }
  if (lambda > 0.0)
    for (double fw : cache.flagged_w) s += fw;  // limit of lz/(1+lz)
  return s;
}

double g_direct(const SpectralCache& cache, double lambda) {
  if (lambda <= 0.0) throw DomainError("g_direct: lambda must be positive");
  if (cache.has_flagged())
    throw SpectralZeroError("g_direct: log det infinite at flagged spectral zeros",
                            cache.flagged);
  double s = cache.a;
  for (double zv : cache.z) s += std::log1p(lambda * zv);
  return s;
}

namespace {

struct Band {
  int m1;  // head is indices 1..m1 (1-based); lambda Z < c there
  int m2;  // tail is indices m2..n; lambda Z > 1/c there
};

// Binary search the sorted Z for the band edges. Ties lambda Z = c land in
// the exact middle band.
Band find_band(const std::vector<double>& z, double lambda, double c) {
  const double lo = c / lambda;        // head: Z < lo
  const double hi = 1.0 / (c * lambda);  // tail: Z > hi
  const auto it_lo = std::lower_bound(z.begin(), z.end(), lo);
  const auto it_hi = std::upper_bound(z.begin(), z.end(), hi);
  Band b;
  b.m1 = static_cast<int>(it_lo - z.begin());
  b.m2 = static_cast<int>(it_hi - z.begin()) + 1;
  return b;
}

double solve_band_constant(double eps, double scale, int s, const char* who) {
  if (eps <= 0.0) throw DomainError(std::string(who) + ": eps must be positive");
  const double c = std::pow(eps / scale, 1.0 / (s + 1));
  if (!(c < 1.0))
    throw DomainError(std::string(who) +
                      ": eps too large, band constant c >= 1 (lower eps)");
  return c;
}

}  // namespace

double f_fast(const SpectralCache& cache, const CumulantTables& tables,
              double lambda, double eps, FastEvalStats* stats) {
  if (lambda <= 0.0) throw DomainError("f_fast: lambda must be positive");
  const int s = tables.s;
  const double c = solve_band_constant(eps, cache.ydoty, s, "f_fast");
  const Band band = find_band(cache.z, lambda, c);

  double result = 0.0;
  // Middle band, exact.
  for (int i = band.m1 + 1; i <= band.m2 - 1; ++i) {
    const double lz = lambda * cache.z[i - 1];
    result += cache.w[i - 1] * lz / (1.0 + lz);
  }
  // Head series: sum_r (-1)^{r+1} lambda^r S[r][m1].
  if (band.m1 > 0) {
    double lp = 1.0;
    for (int r = 1; r <= s; ++r) {
      lp *= lambda;
      result += ((r % 2 == 1) ? lp : -lp) * tables.S[r][band.m1];
    }
  }
  // Tail series: sum_{r=0}^s (-1)^r lambda^{-r} T[r][m2].
  if (band.m2 <= tables.n) {
    double lp = 1.0;
    for (int r = 0; r <= s; ++r) {
      result += ((r % 2 == 0) ? lp : -lp) * tables.T[r][band.m2];
      lp /= lambda;
    }
  }
  for (double fw : cache.flagged_w) result += fw;
  if (stats) {
    stats->head_terms = band.m1;
    stats->middle_terms = std::max(0, band.m2 - band.m1 - 1);
    stats->tail_terms = tables.n - band.m2 + 1;
  }
  return result;
}

double g_fast(const SpectralCache& cache, const CumulantTables& tables,
              double lambda, double eps, FastEvalStats* stats) {
  if (lambda <= 0.0) throw DomainError("g_fast: lambda must be positive");
  if (cache.has_flagged())
    throw SpectralZeroError("g_fast: log det infinite at flagged spectral zeros",
                            cache.flagged);
  const int s = tables.s;
  const double c =
      solve_band_constant(eps, static_cast<double>(tables.n), s, "g_fast");
  const Band band = find_band(cache.z, lambda, c);

  double result = cache.a;
  for (int i = band.m1 + 1; i <= band.m2 - 1; ++i)
    result += std::log1p(lambda * cache.z[i - 1]);
  // Head series: sum_r (-1)^{r-1}/r lambda^r U[r][m1].
  if (band.m1 > 0) {
    double lp = 1.0;
    for (int r = 1; r <= s; ++r) {
      lp *= lambda;
      result += ((r % 2 == 1) ? lp : -lp) * tables.U[r][band.m1] / r;
    }
  }
  // Tail: b[m2] + (n - m2 + 1) log lambda + series over V.
  if (band.m2 <= tables.n) {
    result += tables.b[band.m2] + (tables.n - band.m2 + 1) * std::log(lambda);
    double lp = 1.0;
    for (int r = 1; r <= s; ++r) {
      lp /= lambda;
      result += ((r % 2 == 1) ? lp : -lp) * tables.V[r][band.m2] / r;
    }
  }
  if (stats) {
    stats->head_terms = band.m1;
    stats->middle_terms = std::max(0, band.m2 - band.m1 - 1);
    stats->tail_terms = tables.n - band.m2 + 1;
  }
  return result;
}

namespace {

constexpr std::uint32_t kCacheMagic = 0x44425343;  // "DBSC"
constexpr std::uint32_t kCacheVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void get(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}
void put_vec(std::ostream& out, const std::vector<double>& v) {
  put(out, static_cast<std::uint64_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}
void get_vec(std::istream& in, std::vector<double>& v) {
  std::uint64_t n = 0;
  get(in, n);
  v.resize(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
}
void put_cvec(std::ostream& out, const cvec& v) {
  put(out, static_cast<std::uint64_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(std::complex<double>)));
}
void get_cvec(std::istream& in, cvec& v) {
  std::uint64_t n = 0;
  get(in, n);
  v.resize(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(std::complex<double>)));
}
void put_ivec(std::ostream& out, const std::vector<int>& v) {
  put(out, static_cast<std::uint64_t>(v.size()));
  for (int x : v) put(out, static_cast<std::int64_t>(x));
}
void get_ivec(std::istream& in, std::vector<int>& v) {
  std::uint64_t n = 0;
  get(in, n);
  v.resize(n);
  for (auto& x : v) {
    std::int64_t t = 0;
    get(in, t);
    x = static_cast<int>(t);
  }
}

}  // namespace

void save_spectral_cache(const SpectralCache& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  put(out, kCacheMagic);
  put(out, kCacheVersion);
  put(out, static_cast<std::int64_t>(c.n));
  put(out, static_cast<std::int64_t>(c.width));
  put(out, static_cast<std::int64_t>(c.height));
  put(out, c.ydoty);
  put(out, c.a);
  put(out, static_cast<std::int64_t>(c.zero_count));
  put_cvec(out, c.ahat);
  put_vec(out, c.lhat);
  put_cvec(out, c.yhat);
  put_vec(out, c.z);
  put_vec(out, c.w);
  put_ivec(out, c.perm);
  put_ivec(out, c.flagged);
  put_vec(out, c.flagged_w);
  if (!out) throw std::runtime_error("write failed: " + path);
}

SpectralCache load_spectral_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open spectral cache: " + path);
  std::uint32_t magic = 0, version = 0;
  get(in, magic);
  get(in, version);
  if (magic != kCacheMagic || version != kCacheVersion)
    throw std::runtime_error("bad spectral cache header: " + path);
  SpectralCache c;
  std::int64_t n = 0, w = 0, h = 0, zc = 0;
  get(in, n);
  get(in, w);
  get(in, h);
  get(in, c.ydoty);
  get(in, c.a);
  get(in, zc);
  c.n = static_cast<int>(n);
  c.width = static_cast<int>(w);
  c.height = static_cast<int>(h);
  c.zero_count = static_cast<int>(zc);
  get_cvec(in, c.ahat);
  get_vec(in, c.lhat);
  get_cvec(in, c.yhat);
  get_vec(in, c.z);
  get_vec(in, c.w);
  get_ivec(in, c.perm);
  get_ivec(in, c.flagged);
  get_vec(in, c.flagged_w);
  if (!in) throw std::runtime_error("truncated spectral cache: " + path);
  return c;
}

}  // namespace deblur

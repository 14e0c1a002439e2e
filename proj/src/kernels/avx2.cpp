#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <bit>
#include <cstdint>

#include "raddist/kernels.hpp"

namespace raddist::kernels::avx2 {
namespace {

struct Lanes {
  __m256d k1, k2, k3, one, eps, abs_mask;

  explicit Lanes(const ProfileParams& p)
      : k1(_mm256_set1_pd(p.k1)),
        k2(_mm256_set1_pd(p.k2)),
        k3(_mm256_set1_pd(p.k3)),
        one(_mm256_set1_pd(1.0)),
        eps(_mm256_set1_pd(kSingularDenominator)),
        abs_mask(_mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL))) {}
};

inline __m256d add(__m256d a, __m256d b) { return _mm256_add_pd(a, b); }
inline __m256d mul(__m256d a, __m256d b) { return _mm256_mul_pd(a, b); }

// Bit i set when lane i has a singular (or NaN) denominator.
inline int singular_lanes(const Lanes& l, __m256d den) {
  return _mm256_movemask_pd(_mm256_cmp_pd(_mm256_and_pd(den, l.abs_mask), l.eps, _CMP_NGE_UQ));
}

// Mirrors the scalar profile operation by operation.
template <int Model>
inline __m256d profile(const Lanes& l, __m256d r, int& bad) {
  const __m256d r2 = mul(r, r);
  if constexpr (Model == 0) {
    return add(add(l.one, mul(l.k1, r2)), mul(l.k2, mul(r2, r2)));
  } else if constexpr (Model == 1) {
    return add(l.one, mul(l.k1, r));
  } else if constexpr (Model == 2) {
    return add(l.one, mul(l.k1, r2));
  } else if constexpr (Model == 3) {
    return add(add(l.one, mul(l.k1, r)), mul(l.k2, r2));
  } else if constexpr (Model == 4) {
    const __m256d den = add(l.one, mul(l.k1, r));
    bad = singular_lanes(l, den);
    return _mm256_div_pd(l.one, den);
  } else if constexpr (Model == 5) {
    const __m256d den = add(l.one, mul(l.k1, r2));
    bad = singular_lanes(l, den);
    return _mm256_div_pd(l.one, den);
  } else if constexpr (Model == 6) {
    const __m256d den = add(l.one, mul(l.k2, r2));
    bad = singular_lanes(l, den);
    return _mm256_div_pd(add(l.one, mul(l.k1, r)), den);
  } else if constexpr (Model == 7) {
    const __m256d den = add(add(l.one, mul(l.k1, r)), mul(l.k2, r2));
    bad = singular_lanes(l, den);
    return _mm256_div_pd(l.one, den);
  } else if constexpr (Model == 8) {
    const __m256d den = add(add(l.one, mul(l.k2, r)), mul(l.k3, r2));
    bad = singular_lanes(l, den);
    return _mm256_div_pd(add(l.one, mul(l.k1, r)), den);
  } else {
    const __m256d den = add(add(l.one, mul(l.k2, r)), mul(l.k3, r2));
    bad = singular_lanes(l, den);
    return _mm256_div_pd(add(l.one, mul(l.k1, r2)), den);
  }
}

template <int Model, bool ToPixels>
std::size_t run(const ProfileParams& p, const PixelMap& m, PointsView in, PointsOut out) noexcept {
  const Lanes l(p);
  const __m256d alpha = _mm256_set1_pd(m.alpha);
  const __m256d gamma = _mm256_set1_pd(m.gamma);
  const __m256d u0 = _mm256_set1_pd(m.u0);
  const __m256d beta = _mm256_set1_pd(m.beta);
  const __m256d v0 = _mm256_set1_pd(m.v0);

  const std::size_t n = in.x.size();
  const std::size_t blocked = n - n % 4;
  std::size_t i = 0;
  for (; i < blocked; i += 4) {
    const __m256d x = _mm256_loadu_pd(in.x.data() + i);
    const __m256d y = _mm256_loadu_pd(in.y.data() + i);
    const __m256d r = _mm256_sqrt_pd(add(mul(x, x), mul(y, y)));
    int bad = 0;
    const __m256d f = profile<Model>(l, r, bad);
    if (bad != 0) return i + static_cast<std::size_t>(std::countr_zero(static_cast<unsigned>(bad)));
    const __m256d xd = mul(x, f);
    const __m256d yd = mul(y, f);
    if constexpr (ToPixels) {
      _mm256_storeu_pd(out.x.data() + i, add(add(mul(alpha, xd), mul(gamma, yd)), u0));
      _mm256_storeu_pd(out.y.data() + i, add(mul(beta, yd), v0));
    } else {
      _mm256_storeu_pd(out.x.data() + i, xd);
      _mm256_storeu_pd(out.y.data() + i, yd);
    }
  }
  if (i == n) return kAllValid;

  // Tail through the scalar reference.
  const std::size_t rest = n - i;
  const PointsView tail_in{in.x.subspan(i, rest), in.y.subspan(i, rest)};
  const PointsOut tail_out{out.x.subspan(i, rest), out.y.subspan(i, rest)};
  const std::size_t status =
      ToPixels ? scalar::distort_to_pixels(p, m, tail_in, tail_out) : scalar::distort(p, tail_in, tail_out);
  return status == kAllValid ? kAllValid : i + status;
}

template <bool ToPixels>
std::size_t dispatch_model(const ProfileParams& p, const PixelMap& m, PointsView in, PointsOut out) noexcept {
  switch (p.model_id) {
    case 0: return run<0, ToPixels>(p, m, in, out);
    case 1: return run<1, ToPixels>(p, m, in, out);
    case 2: return run<2, ToPixels>(p, m, in, out);
    case 3: return run<3, ToPixels>(p, m, in, out);
    case 4: return run<4, ToPixels>(p, m, in, out);
    case 5: return run<5, ToPixels>(p, m, in, out);
    case 6: return run<6, ToPixels>(p, m, in, out);
    case 7: return run<7, ToPixels>(p, m, in, out);
    case 8: return run<8, ToPixels>(p, m, in, out);
    case 9: return run<9, ToPixels>(p, m, in, out);
    default: return 0;
  }
}

}  // namespace

std::size_t distort(const ProfileParams& p, PointsView in, PointsOut out) noexcept {
  return dispatch_model<false>(p, PixelMap{}, in, out);
}

std::size_t distort_to_pixels(const ProfileParams& p, const PixelMap& m, PointsView in, PointsOut out) noexcept {
  return dispatch_model<true>(p, m, in, out);
}

}  // namespace raddist::kernels::avx2

#endif

// Matrix exponential by scaling and squaring with a degree-13 Pade approximant

#pragma once

#include <array>
#include <cmath>

#include "gksl/linalg.hpp"

namespace gksl {

/// exp(A) for a square complex matrix. Fixed [13/13] Pade approximant; A is
/// scaled by 2^-s so that ||A/2^s||_1 <= theta_13, then squared s times.
inline CMatrix expm(const CMatrix& a) {
    require_square(a, "expm");
    const Index n = a.rows();
    if (n == 0) return a;

    static constexpr std::array<double, 14> b = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
        129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
        1323241920.0,        40840800.0,          960960.0,           16380.0,
        182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;

    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    int s = 0;
    if (norm1 > theta13) s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    const CMatrix as = a / std::ldexp(1.0, s);

    const CMatrix id = CMatrix::Identity(n, n);
    const CMatrix a2 = as * as;
    const CMatrix a4 = a2 * a2;
    const CMatrix a6 = a4 * a2;

    const CMatrix u_inner = b[13] * a6 + b[11] * a4 + b[9] * a2;
    const CMatrix u = as * (a6 * u_inner + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    const CMatrix v_inner = b[12] * a6 + b[10] * a4 + b[8] * a2;
    const CMatrix v = a6 * v_inner + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

    CMatrix r = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < s; ++k) r = r * r;
    return r;
}

}  // namespace gksl

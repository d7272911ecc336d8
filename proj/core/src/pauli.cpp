#include "qhop/pauli.hpp"

#include <cmath>
#include <stdexcept>

namespace qhop {

using cdouble = std::complex<double>;

const Mat2& sigma(int mu) {
    static const std::array<Mat2, 4> s = [] {
        std::array<Mat2, 4> m;
        m[0] << 1, 0, 0, 1;
        m[1] << 0, 1, 1, 0;
        m[2] << 0, cdouble(0, -1), cdouble(0, 1), 0;
        m[3] << 1, 0, 0, -1;
        return m;
    }();
    if (mu < 0 || mu > 3) throw std::invalid_argument("sigma index must be 0..3");
    return s[size_t(mu)];
}

Mat2 pauli_dot(const std::array<double, 3>& v) {
    return v[0] * sigma(1) + v[1] * sigma(2) + v[2] * sigma(3);
}

const Mat2& spin_metric() {
    static const Mat2 eps = [] {
        Mat2 e;
        e << 0, 1, -1, 0;
        return e;
    }();
    return eps;
}

Vec2 spin_up_along(const std::array<double, 3>& axis) {
    const double r = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (!(r > 0)) throw std::invalid_argument("spin axis must be nonzero");
    const double x = axis[0] / r, y = axis[1] / r, z = axis[2] / r;

    Vec2 chi;
    if (z >= 0) {
        const double c = std::sqrt((1.0 + z) / 2.0);
        chi << c, cdouble(x, y) / (2.0 * c);
    } else {
        const double c = std::sqrt((1.0 - z) / 2.0);
        chi << cdouble(x, -y) / (2.0 * c), c;
    }
    return chi;
}

Vec2 spin_down_along(const std::array<double, 3>& axis) {
    return spin_up_along({-axis[0], -axis[1], -axis[2]});
}

}  // namespace qhop

#pragma once

#include <cmath>
#include <complex>

namespace rfcsim {

/// Reference frame a two-component phasor is expressed in.
enum class Frame {
    Rail,    ///< common Re-Im frame of the 16 2/3 Hz railway grid
    Public,  ///< common Re-Im frame of the 50 Hz public grid
    Rotor,   ///< dq frame of one machine rotor
};

/// Pair of per-unit values tagged with their frame. Mixing frames does not compile.
///
/// For the grid frames `x` is the real and `y` the imaginary part; in the rotor
/// frame `x` is the d-axis and `y` the q-axis component.
template <Frame F>
struct Phasor2 {
    double x{0.0};
    double y{0.0};

    constexpr double re() const requires(F != Frame::Rotor) { return x; }
    constexpr double im() const requires(F != Frame::Rotor) { return y; }
    constexpr double d() const requires(F == Frame::Rotor) { return x; }
    constexpr double q() const requires(F == Frame::Rotor) { return y; }

    std::complex<double> complex() const requires(F != Frame::Rotor) { return {x, y}; }
    static Phasor2 from_complex(std::complex<double> c) requires(F != Frame::Rotor) {
        return {c.real(), c.imag()};
    }

    double abs() const { return std::hypot(x, y); }

    constexpr Phasor2& operator+=(Phasor2 o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    constexpr Phasor2& operator-=(Phasor2 o) {
        x -= o.x;
        y -= o.y;
        return *this;
    }
    friend constexpr Phasor2 operator+(Phasor2 a, Phasor2 b) { return a += b; }
    friend constexpr Phasor2 operator-(Phasor2 a, Phasor2 b) { return a -= b; }
    friend constexpr Phasor2 operator*(double s, Phasor2 a) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Phasor2, Phasor2) = default;
};

using RailPhasor = Phasor2<Frame::Rail>;
using PublicPhasor = Phasor2<Frame::Public>;
using RotorPhasor = Phasor2<Frame::Rotor>;

inline RotorPhasor make_dq(double d, double q) { return {d, q}; }

}  // namespace rfcsim

#pragma once

// Named configurations used by the CLI and the acceptance suite.

#include "resext/errors.hpp"
#include "resext/toric_model.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace resext {

struct Preset {
    std::string name;
    std::string description;
    ToricData data;
    MonomialSection f;
    int sigma = 1;
    /// Test function for measure computations (identically 1 where none is needed).
    BumpFunction g;
};

namespace detail {

inline Polynomial tilt_x1(std::size_t n, Rational coef)
{
    Exponent a(n, 0);
    a[0] = 1;
    return Polynomial::monomial(std::move(a), std::move(coef));
}

inline MonomialSection one_plus_z1()
{
    MonomialSection f = MonomialSection::monomial({0, 0});
    f.add({1, 0}, 1.0);
    return f;
}

} // namespace detail

inline std::vector<std::string> preset_names()
{
    return {"calib1d", "box2", "box2-smooth", "box2-smooth-neg", "prop2d", "prop2d-smooth", "model-sigma2"};
}

inline Preset preset(std::string_view name)
{
    Preset p;
    p.name = std::string(name);
    if (name == "calib1d") {
        p.description = "n=1, c=0, nu=1, m=1, f=1, sigma=1";
        p.data = ToricData::make({0}, {1}, 1);
        p.f = MonomialSection::monomial({0});
        p.g = BumpFunction::unit(1);
    } else if (name == "box2" || name == "box2-smooth" || name == "box2-smooth-neg") {
        Polynomial smooth;
        if (name == "box2-smooth") smooth = detail::tilt_x1(2, Rational(1, 10));
        if (name == "box2-smooth-neg") smooth = detail::tilt_x1(2, Rational(-1, 10));
        p.description = "n=2, c=(0,0), nu=(1,1), m=1, f=1+z1";
        if (!smooth.is_zero()) p.description += name == "box2-smooth" ? ", smooth term x1/10" : ", smooth term -x1/10";
        p.data = ToricData::make({0, 0}, {1, 1}, 1, smooth);
        p.f = detail::one_plus_z1();
        p.sigma = 2;
        p.g = BumpFunction::unit(2);
    } else if (name == "prop2d" || name == "prop2d-smooth") {
        Polynomial smooth;
        if (name == "prop2d-smooth") smooth = detail::tilt_x1(2, Rational(1, 10));
        p.description = "n=2, c=(1/2,0), nu=(1,1), m=3/2, f=z1, bump on {z1=0} in x2 (center 1/2, radius 1/4)";
        if (!smooth.is_zero()) p.description += ", smooth term x1/10";
        p.data = ToricData::make({Rational(1, 2), 0}, {1, 1}, Rational(3, 2), smooth);
        p.f = MonomialSection::monomial({1, 0});
        p.g = BumpFunction::on_centre({0}, {0.0, 0.5}, 0.25, 0.2);
    } else if (name == "model-sigma2") {
        p.description = "n=3, c=0, nu=(1,1,0), m=1, f=1, sigma=2, separable bump";
        p.data = ToricData::make({0, 0, 0}, {1, 1, 0}, 1);
        p.f = MonomialSection::monomial({0, 0, 0});
        p.sigma = 2;
        p.g = BumpFunction::separable({BumpFactor{0.0, 0.6}, BumpFactor{0.0, 0.6}, BumpFactor{0.4, 0.3}});
    } else {
        throw PreconditionError("unknown preset '" + std::string(name) + "'");
    }
    return p;
}

} // namespace resext

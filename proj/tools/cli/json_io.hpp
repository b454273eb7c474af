#pragma once

// JSON encodings of the library types. Rationals travel as "p/q" strings,
// coordinates in reports are 1-based (z_1 ... z_n).

#include "resext/extension_engine.hpp"
#include "resext/ideal_engine.hpp"
#include "resext/residue_analysis.hpp"
#include "resext/toric_model.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <sstream>
#include <string>

namespace resext::cli {

using json = nlohmann::json;

inline std::string exponent_key(const Exponent& a)
{
    std::string key;
    for (std::size_t j = 0; j < a.size(); ++j) key += (j ? "," : "") + std::to_string(a[j]);
    return key;
}

inline Exponent parse_exponent_key(const std::string& key, std::size_t n)
{
    Exponent a;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, ',')) a.push_back(std::stoi(part));
    if (a.size() != n) throw PreconditionError("exponent '" + key + "' has wrong dimension");
    return a;
}

/// JSON numbers stay finite; infinities become the strings "inf"/"-inf".
inline json number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

inline Rational rational_from_json(const json& j)
{
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number()) return parse_rational(j.dump());
    throw PreconditionError("expected a rational, got " + j.dump());
}

inline json to_json(const Polynomial& p)
{
    json out = json::object();
    for (const auto& [a, coef] : p.terms()) out[exponent_key(a)] = to_string(coef);
    return out;
}

inline json to_json(const ToricData& d)
{
    json c = json::array(), nu = json::array();
    for (const auto& v : d.c) c.push_back(to_string(v));
    for (const auto& v : d.nu) nu.push_back(to_string(v));
    return {{"n", d.n}, {"c", c}, {"nu", nu}, {"m", to_string(d.m)}, {"smooth_term", to_json(d.smooth_term)}};
}

inline ToricData toric_data_from_json(const json& j)
{
    if (!j.contains("c") || !j.contains("nu")) throw PreconditionError("config needs 'c' and 'nu'");
    std::vector<Rational> c, nu;
    for (const auto& v : j.at("c")) c.push_back(rational_from_json(v));
    for (const auto& v : j.at("nu")) nu.push_back(rational_from_json(v));
    if (j.contains("n") && j.at("n").get<std::size_t>() != c.size()) throw PreconditionError("'n' does not match 'c'");
    const Rational m = j.contains("m") ? rational_from_json(j.at("m")) : Rational(0);
    std::map<Exponent, Rational> terms;
    if (j.contains("smooth_term")) {
        for (const auto& [key, coef] : j.at("smooth_term").items()) {
            terms[parse_exponent_key(key, c.size())] += rational_from_json(coef);
        }
    }
    return ToricData::make(std::move(c), std::move(nu), m, Polynomial(std::move(terms)));
}

inline json to_json(const MonomialIdeal& I)
{
    json gens = json::array();
    for (const auto& g : I.generators()) gens.push_back(g);
    return {{"gens", gens}};
}

inline json to_json(const JumpSchedule& s)
{
    json jumps = json::array(), ideals = json::array();
    for (const auto& m : s.jumps) jumps.push_back(to_string(m));
    for (const auto& I : s.ideals) ideals.push_back(to_json(I));
    return {{"lo", to_string(s.lo)}, {"hi", to_string(s.hi)}, {"jumps", jumps}, {"ideals", ideals}};
}

inline json one_based(const std::vector<std::size_t>& idx)
{
    json out = json::array();
    for (std::size_t j : idx) out.push_back(j + 1);
    return out;
}

inline json to_json(const LcStructure& lc)
{
    json centres = json::object();
    for (std::size_t s = 0; s <= lc.sigma_mlc; ++s) {
        json list = json::array();
        for (const auto& c : lc.centres(s)) list.push_back(one_based(c));
        centres[std::to_string(s)] = list;
    }
    return {{"relevant", one_based(lc.relevant)}, {"sigma_mlc", lc.sigma_mlc}, {"centres", centres}};
}

inline json to_json(const PotentialDecomposition& d)
{
    json s0 = json::array(), bphi = json::array();
    for (const auto& v : d.s0) s0.push_back(to_string(v));
    for (const auto& v : d.bphi_exponents) bphi.push_back(to_string(v));
    return {{"relevant", one_based(d.relevant)},
            {"s0", s0},
            {"bphi_exponents", bphi},
            {"bphi_smooth", to_json(d.bphi_smooth)},
            {"constant", to_string(d.constant)}};
}

inline std::string format_double(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

/// Human-readable section, e.g. "1 + z1 + 2*z1*z2^3".
inline std::string format_section(const MonomialSection& f)
{
    if (f.is_zero()) return "0";
    std::string out;
    for (const auto& [a, coef] : f.terms()) {
        std::string mono;
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (a[j] == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += "z" + std::to_string(j + 1);
            if (a[j] > 1) mono += "^" + std::to_string(a[j]);
        }
        std::string c;
        bool negative = false;
        if (coef.imag() != 0.0) {
            c = "(" + format_double(coef.real()) + (coef.imag() < 0 ? "-" : "+") + format_double(std::abs(coef.imag())) + "i)";
        } else {
            negative = coef.real() < 0.0;
            const double mag = std::abs(coef.real());
            if (mag != 1.0 || mono.empty()) c = format_double(mag);
        }
        std::string term = c.empty() ? mono : (mono.empty() ? c : c + "*" + mono);
        if (out.empty()) {
            out = negative ? "-" + term : term;
        } else {
            out += negative ? " - " + term : " + " + term;
        }
    }
    return out;
}

inline json to_json(const MonomialSection& f)
{
    json terms = json::object();
    for (const auto& [a, coef] : f.terms()) {
        terms[exponent_key(a)] = coef.imag() == 0.0 ? json(coef.real()) : json::array({coef.real(), coef.imag()});
    }
    return {{"text", format_section(f)}, {"terms", terms}};
}

/// Parses sums of monomials such as "1+z1", "2*z1^2*z3 + z2", "z1z2".
inline MonomialSection parse_section(const std::string& text, std::size_t n)
{
    MonomialSection f(n);
    std::string s;
    for (char ch : text) {
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    }
    if (s.empty()) throw PreconditionError("empty section");
    std::size_t pos = 0;
    auto fail = [&](const std::string& why) { throw PreconditionError("cannot parse section '" + text + "': " + why); };
    while (pos < s.size()) {
        double sign = 1.0;
        if (s[pos] == '+' || s[pos] == '-') {
            sign = s[pos] == '-' ? -1.0 : 1.0;
            ++pos;
        }
        double coef = 1.0;
        Exponent a(n, 0);
        bool any = false;
        while (pos < s.size() && s[pos] != '+' && s[pos] != '-') {
            if (s[pos] == '*') {
                ++pos;
                continue;
            }
            if (s[pos] == 'z') {
                ++pos;
                std::size_t start = pos;
                while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
                if (start == pos) fail("missing variable index");
                const std::size_t j = std::stoul(s.substr(start, pos - start));
                if (j < 1 || j > n) fail("variable z" + std::to_string(j) + " out of range");
                int power = 1;
                if (pos < s.size() && s[pos] == '^') {
                    ++pos;
                    start = pos;
                    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
                    if (start == pos) fail("missing exponent");
                    power = std::stoi(s.substr(start, pos - start));
                }
                a[j - 1] += power;
                any = true;
            } else if (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.') {
                std::size_t start = pos;
                while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' || s[pos] == '/')) {
                    ++pos;
                }
                coef *= to_double(parse_rational(s.substr(start, pos - start)));
                any = true;
            } else {
                fail(std::string("unexpected character '") + s[pos] + "'");
            }
        }
        if (!any) fail("empty term");
        f.add(std::move(a), sign * coef);
    }
    return f;
}

inline json to_json(const QuadResult& r)
{
    json ev = json::array();
    for (double v : r.evidence) ev.push_back(number(v));
    return {{"value", number(r.value)},
            {"abs_error", number(r.abs_error)},
            {"status", to_string(r.status)},
            {"engine", r.engine},
            {"evidence", ev}};
}

inline json to_json(const ResidueReport& r)
{
    json samples = json::array();
    for (const auto& s : r.samples) {
        samples.push_back(
            {{"eps", s.eps}, {"value", number(s.value)}, {"error", number(s.error)}, {"status", to_string(s.status)}});
    }
    json out = {{"sigma", r.sigma},
                {"ell", r.ell},
                {"classification", to_string(r.classification)},
                {"samples", samples},
                {"residue_norm", nullptr}};
    if (r.residue_norm) out["residue_norm"] = {{"value", number(r.residue_norm->first)}, {"error", number(r.residue_norm->second)}};
    return out;
}

inline json shells_json(const std::vector<std::pair<double, double>>& shells)
{
    json out = json::array();
    for (const auto& [t, v] : shells) out.push_back({{"t", t}, {"value", number(v)}});
    return out;
}

inline json to_json(const MeasureReport& r)
{
    return {{"lc_norm", {{"value", number(r.lc_norm)}, {"error", number(r.lc_error)}}},
            {"lc_restriction", number(r.lc_restriction)},
            {"ohsawa_norm", {{"value", number(r.ohsawa_norm)}, {"error", number(r.ohsawa_error)}}},
            {"ohsawa_weighted", number(r.ohsawa_weighted)},
            {"shells", shells_json(r.shells)},
            {"shells_weighted", shells_json(r.shells_weighted)},
            {"discrepancy", number(r.discrepancy)},
            {"extension_discrepancy", number(r.extension_discrepancy)},
            {"pass", r.pass},
            {"message", r.message}};
}

inline json to_json(const EstimateRow& r)
{
    return {{"stage_sigma", r.stage_sigma},
            {"eps", r.eps == 0.0 ? json("0+") : json(r.eps)},
            {"lhs", number(r.lhs)},
            {"lhs_error", number(r.lhs_error)},
            {"rhs", number(r.rhs)},
            {"ok", r.ok}};
}

inline json to_json(const ExtensionStage& s)
{
    json rows = json::array();
    for (const auto& r : s.rows) rows.push_back(to_json(r));
    return {{"sigma", s.sigma},
            {"centre", one_based(s.centre)},
            {"f", to_json(s.f)},
            {"F", to_json(s.F)},
            {"C", number(s.C)},
            {"rf0", number(s.rf0)},
            {"rf0_restriction", number(s.rf0_restriction)},
            {"estimate_table", rows},
            {"congruence_ok", s.congruence_ok},
            {"pass", s.pass}};
}

inline json to_json(const ExtensionResult& r)
{
    json stages = json::array();
    for (const auto& s : r.stages) stages.push_back(to_json(s));
    return {{"F", to_json(r.F)}, {"C", number(r.C)}, {"stages", stages}, {"congruence_ok", r.congruence_ok}, {"pass", r.pass}};
}

} // namespace resext::cli

#include "pcsmono/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace pcsmono {

namespace {

const Json& require(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("state file is missing \"") + key + "\"");
    return j.at(key);
}

int require_int(const Json& j, const char* key) {
    const Json& v = require(j, key);
    if (!v.is_number_integer()) throw InputError(std::string("\"") + key + "\" must be an integer");
    return v.get<int>();
}

double require_number(const Json& j, const char* key) {
    const Json& v = require(j, key);
    if (!v.is_number()) throw InputError(std::string("\"") + key + "\" must be a number");
    return v.get<double>();
}

Json parties_to_json(const PartySet& set) {
    Json out = Json::array();
    for (int p : set) out.push_back(p + 1);
    return out;
}

}  // namespace

Json coefficients_to_json(const WClassCoefficients& coeffs) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < coeffs.a().rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < coeffs.a().cols(); ++j) {
            const Complex z = coeffs.a()(i, j);
            row.push_back(Json::array({z.real(), z.imag()}));
        }
        rows.push_back(std::move(row));
    }
    return Json{{"n", coeffs.n()}, {"d", coeffs.d()}, {"a", std::move(rows)}};
}

WClassCoefficients coefficients_from_json(const Json& j) {
    const int n = require_int(j, "n");
    const int d = require_int(j, "d");
    if (n < 1 || d < 2) throw InputError("state file needs n >= 1 and d >= 2");
    const Json& rows = require(j, "a");
    if (!rows.is_array() || static_cast<int>(rows.size()) != n) throw InputError("\"a\" must hold one row per party");
    Matrix a(n, d - 1);
    for (int i = 0; i < n; ++i) {
        const Json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != d - 1) {
            throw InputError("each row of \"a\" must hold d-1 entries");
        }
        for (int k = 0; k < d - 1; ++k) {
            const Json& z = row[static_cast<std::size_t>(k)];
            if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
                throw InputError("coefficients must be [re, im] pairs");
            }
            a(i, k) = Complex(z[0].get<double>(), z[1].get<double>());
        }
    }
    return WClassCoefficients(std::move(a), d);
}

Json state_to_json(const PCSState& pcs) {
    Json j = coefficients_to_json(pcs.coeffs);
    j["p"] = pcs.params.p;
    j["lambda"] = pcs.params.lambda;
    return j;
}

PCSState state_from_json(const Json& j) {
    PCSParams params{require_number(j, "p"), require_number(j, "lambda")};
    validate(params);
    return PCSState{coefficients_from_json(j), params};
}

Json matrix_to_json(const Matrix& m) {
    Json re = Json::array();
    Json im = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json rr = Json::array();
        Json ri = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            rr.push_back(m(r, c).real());
            ri.push_back(m(r, c).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ri));
    }
    return Json{{"re", std::move(re)}, {"im", std::move(im)}};
}

Json report_to_json(const MonogamyReport& report) {
    Json terms = Json::array();
    for (const auto& t : report.terms) {
        terms.push_back(Json{{"parties", parties_to_json(t.index.parties)},
                             {"m", t.index.m},
                             {"value", t.value},
                             {"method", std::string(to_string(t.method))}});
    }
    return Json{{"claim", std::string(to_string(report.claim))},
                {"focus", report.focus + 1},
                {"lhs", report.lhs},
                {"lhs_method", std::string(to_string(report.lhs_method))},
                {"terms", std::move(terms)},
                {"residual", report.residual},
                {"pass", report.pass},
                {"tolerance", report.tolerance},
                {"seed", report.seed}};
}

Json verification_to_json(const VerificationReport& report) {
    Json checks = Json::array();
    for (const auto& c : report.checks) {
        checks.push_back(Json{{"name", c.name},
                              {"pass", c.passed},
                              {"metric", c.metric},
                              {"tolerance", c.tolerance},
                              {"detail", c.detail}});
    }
    Json reports = Json::array();
    for (const auto& r : report.reports) reports.push_back(report_to_json(r));
    return Json{{"pass", report.all_passed()}, {"checks", std::move(checks)}, {"reports", std::move(reports)}};
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InputError("malformed JSON in " + path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text, std::ostream& console) {
    if (path.empty() || path == "-") {
        console << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

}  // namespace pcsmono

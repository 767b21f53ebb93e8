#include "visualmetrics/verify_cli.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace visualmetrics {

const char* cmp_name(Cmp c) {
    switch (c) {
        case Cmp::Le: return "le";
        case Cmp::Ge: return "ge";
        case Cmp::Eq: return "eq";
    }
    return "eq";
}

bool evaluate_row(double measured, double target, double tol, Cmp cmp) {
    if (!std::isfinite(measured)) return false;
    switch (cmp) {
        case Cmp::Le: return measured <= target + tol;
        case Cmp::Ge: return measured >= target - tol;
        case Cmp::Eq: return std::abs(measured - target) <= tol;
    }
    return false;
}

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Cmp parse_cmp(const std::string& s) {
    if (s == "le") return Cmp::Le;
    if (s == "ge") return Cmp::Ge;
    if (s == "eq") return Cmp::Eq;
    throw Error(ErrorCode::InvalidArgument, "unknown comparison '" + s + "'");
}

}  // namespace

std::string kv(const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return key + "=" + buf + ";";
}

std::string kv(const std::string& key, const std::string& value) { return key + "=" + value + ";"; }

EvidenceRow make_row(const std::string& scenario, const std::string& params, double measured, double target, double tol,
                     Cmp cmp) {
    EvidenceRow r;
    r.scenario = scenario;
    r.params = params + "cmp=" + cmp_name(cmp);
    r.measured = measured;
    r.target = target;
    r.tol = tol;
    r.cmp = cmp;
    r.pass = evaluate_row(measured, target, tol, cmp);
    return r;
}

std::string format_csv(const std::vector<EvidenceRow>& rows) {
    std::string out = "scenario,params,measured,target,tol,pass\n";
    for (const EvidenceRow& r : rows) {
        out += r.scenario + ',' + r.params + ',' + num(r.measured) + ',' + num(r.target) + ',' + num(r.tol) + ',' +
               (r.pass ? "true" : "false") + '\n';
    }
    return out;
}

std::string param_value(const EvidenceRow& row, const std::string& key) {
    std::istringstream is(row.params);
    std::string item;
    while (std::getline(is, item, ';')) {
        const auto eq = item.find('=');
        if (eq != std::string::npos && item.substr(0, eq) == key) return item.substr(eq + 1);
    }
    return "";
}

std::vector<EvidenceRow> parse_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::vector<EvidenceRow> rows;
    if (!std::getline(is, line) || line != "scenario,params,measured,target,tol,pass")
        throw Error(ErrorCode::InvalidArgument, "unexpected CSV header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() != 6) throw Error(ErrorCode::InvalidArgument, "CSV row with " + std::to_string(f.size()) + " fields");
        EvidenceRow r;
        r.scenario = f[0];
        r.params = f[1];
        r.measured = std::stod(f[2]);
        r.target = std::stod(f[3]);
        r.tol = std::stod(f[4]);
        r.cmp = parse_cmp(param_value(r, "cmp"));
        r.pass = f[5] == "true";
        rows.push_back(r);
    }
    return rows;
}

}  // namespace visualmetrics

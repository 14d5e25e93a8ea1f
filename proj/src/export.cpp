#include "pwlnet/export.hpp"

#include "pwlnet/net.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>

namespace pwlnet {

using ordered_json = nlohmann::ordered_json;

std::string breakpoints_csv_exact(const Pwl& f) {
    std::ostringstream os;
    os << "x_num,x_den,y_num,y_den\n";
    for (const auto& b : f.breakpoints())
        os << b.x.get_num().get_str() << "," << b.x.get_den().get_str() << "," << b.y.get_num().get_str()
           << "," << b.y.get_den().get_str() << "\n";
    return os.str();
}

std::string breakpoints_csv_float(const Pwl& f) {
    std::ostringstream os;
    os << "x,y\n";
    char buf[64];
    for (const auto& b : f.breakpoints()) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g", rat_double(b.x), rat_double(b.y));
        os << buf << "\n";
    }
    return os.str();
}

std::string pwl_to_json(const Pwl& f) {
    ordered_json j;
    j["kind"] = "pwl";
    if (f.domain())
        j["domain"] = ordered_json::array({rat_str(f.domain()->lo), rat_str(f.domain()->hi)});
    else
        j["domain"] = nullptr;
    j["left_slope"] = rat_str(f.left_slope());
    j["right_slope"] = rat_str(f.right_slope());
    j["breakpoints"] = ordered_json::array();
    for (const auto& b : f.breakpoints())
        j["breakpoints"].push_back(ordered_json::array({rat_str(b.x), rat_str(b.y)}));
    if (f.breakpoints().empty()) {
        Rat x = f.domain() ? f.domain()->lo : Rat(0);
        j["anchor"] = ordered_json::array({rat_str(x), rat_str(f(x))});
    }
    return j.dump(2) + "\n";
}

Pwl pwl_from_json(std::string_view text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw parse_error(std::string("pwl: invalid JSON: ") + e.what());
    }
    if (!j.is_object() || j.value("kind", "") != "pwl") throw parse_error("pwl: expected object with kind \"pwl\"");

    auto get_rat = [&](const ordered_json& v, const char* at) -> Rat {
        if (!v.is_string()) throw parse_error(std::string("pwl.") + at + ": expected rational string");
        try {
            return rat_parse(v.get<std::string>());
        } catch (const std::exception& e) {
            throw parse_error(std::string("pwl.") + at + ": " + e.what());
        }
    };

    Domain dom;
    if (!j.contains("domain")) throw parse_error("pwl: missing domain");
    if (!j["domain"].is_null()) {
        if (!j["domain"].is_array() || j["domain"].size() != 2) throw parse_error("pwl.domain: expected [lo, hi]");
        Rat lo = get_rat(j["domain"][0], "domain"), hi = get_rat(j["domain"][1], "domain");
        if (lo > hi) throw parse_error("pwl.domain: lo > hi");
        dom = Interval(lo, hi);
    }
    if (!j.contains("left_slope") || !j.contains("right_slope") || !j.contains("breakpoints"))
        throw parse_error("pwl: missing left_slope/right_slope/breakpoints");
    Rat ls = get_rat(j["left_slope"], "left_slope");
    Rat rs = get_rat(j["right_slope"], "right_slope");

    std::vector<Breakpoint> pts;
    for (const auto& b : j["breakpoints"]) {
        if (!b.is_array() || b.size() != 2) throw parse_error("pwl.breakpoints: expected [x, y] pairs");
        pts.push_back({get_rat(b[0], "breakpoints"), get_rat(b[1], "breakpoints")});
    }
    if (pts.empty()) {
        if (!j.contains("anchor")) throw parse_error("pwl: affine form needs an anchor");
        if (ls != rs) throw parse_error("pwl: affine form needs equal slopes");
        Rat x = get_rat(j["anchor"][0], "anchor"), y = get_rat(j["anchor"][1], "anchor");
        return Pwl::affine(ls, Rat(y - ls * x), dom);
    }
    return Pwl::from_points(std::move(pts), ls, rs, dom);
}

} // namespace pwlnet

#include "pwlnet/arrangement2d.hpp"
#include "pwlnet/bounds.hpp"
#include "pwlnet/constructions.hpp"
#include "pwlnet/export.hpp"
#include "pwlnet/suite.hpp"
#include "pwlnet/verify.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace pwlnet;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::vector<long> parse_widths(const std::string& csv) {
    std::vector<long> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stol(tok));
    }
    if (out.empty()) throw CLI::ValidationError("--widths", "expected a comma-separated list");
    return out;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("PWLNET_SEED")) return std::strtoull(env, nullptr, 10);
    return 12345;
}

/// The network function of a spec file, or the function in a pwl file.
Pwl load_function(const std::string& path) {
    std::string text = read_file(path);
    try {
        return pwl_from_json(text);
    } catch (const parse_error&) {
        return forward_symbolic(parse_network(text));
    }
}

int cmd_construct(const std::string& kind, long w, long w1, long w2, long k, long base, long depth,
                  const std::string& widths_csv, const std::string& out, const std::string& report_path) {
    ConstructionResult r;
    if (kind == "twoproduct")
        r = gen_twoproduct(w1, w2);
    else if (kind == "width3_4k")
        r = gen_width3_4k(w, k);
    else if (kind == "intra_twolayer")
        r = gen_intra_twolayer(w1, w2);
    else if (kind == "intra_sawtooth")
        r = gen_intra_sawtooth(parse_widths(widths_csv));
    else if (kind == "width2_intra")
        r = gen_width2_intra(k);
    else if (kind == "all_linked_onelayer")
        r = gen_all_linked_onelayer(w);
    else if (kind == "all_linked_5k")
        r = gen_all_linked_5k(k);
    else if (kind == "all_linked_9k")
        r = gen_all_linked_9k(k);
    else if (kind == "resnet_sawtooth")
        r = gen_resnet_sawtooth(k);
    else if (kind == "dense_net")
        r = gen_densenet(parse_widths(widths_csv));
    else if (kind == "telgarsky")
        r = gen_telgarsky(base, depth);
    else
        throw CLI::ValidationError("--kind", "unknown construction '" + kind + "'");

    if (!out.empty()) write_file(out, serialize(r.net));
    long pieces = exact_pieces(r);
    std::cout << "pieces=" << pieces << "\n";
    std::cout << "guaranteed=" << r.guaranteed_pieces.get_str() << (r.tight ? " (tight)" : " (at least)")
              << " claim=" << r.claim_ref << "\n";
    if (r.sawtooth)
        std::cout << "sawtooth=" << r.sawtooth->pieces << " pieces on [" << rat_str(r.sawtooth->interval.lo)
                  << ", " << rat_str(r.sawtooth->interval.hi) << "]\n";
    if (!report_path.empty()) {
        std::ostringstream os;
        os << "{\n  \"kind\": \"" << kind << "\",\n  \"pieces\": " << pieces << ",\n  \"guaranteed\": \""
           << r.guaranteed_pieces.get_str() << "\",\n  \"tight\": " << (r.tight ? "true" : "false")
           << ",\n  \"claim\": \"" << r.claim_ref << "\"\n}\n";
        write_file(report_path, os.str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact piecewise-linear analysis of relu networks with intra-layer links"};
    app.require_subcommand(1);

    // construct
    auto* construct = app.add_subcommand("construct", "Generate a catalog network and audit its piece count");
    std::string kind, widths_csv, out_path, report_path;
    long w = 0, w1 = 0, w2 = 0, k = 0, base = 0, depth = 0;
    construct->add_option("--kind", kind, "construction id")->required();
    construct->add_option("--w", w, "width");
    construct->add_option("--w1", w1, "first-layer width");
    construct->add_option("--w2", w2, "second-layer width");
    construct->add_option("--k", k, "depth parameter");
    construct->add_option("--base", base, "mirror base");
    construct->add_option("--depth", depth, "mirror depth");
    construct->add_option("--widths", widths_csv, "comma-separated layer widths");
    construct->add_option("--out", out_path, "write the network spec JSON here");
    construct->add_option("--report", report_path, "write a JSON verification report here");

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate a network or pwl file at a rational point");
    std::string eval_in, eval_x;
    bool eval_float = false;
    eval->add_option("--in", eval_in, "network or pwl JSON file")->required();
    eval->add_option("--x", eval_x, "abscissa p/q")->required();
    eval->add_flag("--float", eval_float, "also print a double approximation");

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "Exact piece/breakpoint/zero census");
    std::string an_in;
    analyze_cmd->add_option("--in", an_in, "network or pwl JSON file")->required();

    // bound
    auto* bound = app.add_subcommand("bound", "Closed-form piece/region bounds");
    std::string bd_widths, bd_mode = "ff";
    long bd_n = 1;
    bound->add_option("--widths", bd_widths, "comma-separated hidden widths")->required();
    bound->add_option("--mode", bd_mode, "ff | intra2 | intra_all | resnet | dense");
    bound->add_option("--n", bd_n, "input dimension (1 = piece bound)");

    // fuzz
    auto* fuzz = app.add_subcommand("fuzz", "Randomized soundness checks");
    std::string fz_what = "bounds", fz_mode = "ff", fz_out;
    std::uint64_t fz_seed = default_seed();
    int fz_cases = 200;
    fuzz->add_option("--what", fz_what, "bounds | lemmas");
    fuzz->add_option("--mode", fz_mode, "ff | intra2 (bounds only)");
    fuzz->add_option("--cases", fz_cases, "number of cases");
    fuzz->add_option("--seed", fz_seed, "rng seed");
    fuzz->add_option("--out", fz_out, "write the JSON report here");

    // separation
    auto* sep = app.add_subcommand("separation", "Certify a depth-separation statement");
    std::string sp_theorem, sp_out;
    long sp_k = 2;
    sep->add_option("--theorem", sp_theorem, "k2_vs_2 | k2_vs_3 | k2_vs_k")->required();
    sep->add_option("--k", sp_k, "depth parameter")->required();
    sep->add_option("--out", sp_out, "write the JSON report here");

    // regions
    auto* regions = app.add_subcommand("regions", "Exact 2-D linear-region census");
    std::string rg_net, rg_box = "-1,-1,1,1", rg_out, rg_svg;
    regions->add_option("--net", rg_net, "network spec JSON (input_dim 2)")->required();
    regions->add_option("--box", rg_box, "x0,y0,x1,y1 rational corners");
    regions->add_option("--out", rg_out, "write the decomposition JSON here");
    regions->add_option("--svg", rg_svg, "write an SVG rendering here");

    // export
    auto* exp = app.add_subcommand("export", "Breakpoint tables for a network or pwl file");
    std::string ex_in, ex_format = "csv-exact", ex_out;
    exp->add_option("--in", ex_in, "network or pwl JSON file")->required();
    exp->add_option("--format", ex_format, "csv-exact | csv-float | json");
    exp->add_option("--out", ex_out, "output path (stdout when omitted)");

    // suite
    auto* suite = app.add_subcommand("suite", "Run the acceptance battery");
    std::string su_config, su_out;
    suite->add_option("--config", su_config, "key=value config file");
    suite->add_option("--out", su_out, "write the summary JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (*construct) return cmd_construct(kind, w, w1, w2, k, base, depth, widths_csv, out_path, report_path);

        if (*eval) {
            Pwl f = load_function(eval_in);
            Rat v = f(rat_parse(eval_x));
            std::cout << rat_str(v) << "\n";
            if (eval_float) std::cout << rat_double(v) << "\n";
            return 0;
        }

        if (*analyze_cmd) {
            PieceReport r = pwlnet::analyze(load_function(an_in));
            std::cout << "{\n  \"pieces\": " << r.pieces << ",\n  \"breakpoints\": " << r.breakpoints
                      << ",\n  \"crossing_zeros\": " << r.crossing_zeros << ",\n  \"distinct_zeros\": "
                      << r.distinct_zeros << "\n}\n";
            return 0;
        }

        if (*bound) {
            ArchShape shape = ArchShape::uniform(parse_widths(bd_widths), link_mode_from_name(bd_mode), bd_n);
            if (bd_n == 1) {
                BoundReport rep = piece_upper_bound(shape);
                std::cout << rep.upper.get_str() << "\n";
            } else {
                std::cout << region_upper_bound(shape).get_str() << "\n";
            }
            return 0;
        }

        if (*fuzz) {
            FuzzConfig cfg;
            cfg.seed = fz_seed;
            cfg.cases = fz_cases;
            FuzzReport rep = fz_what == "lemmas"
                                 ? fuzz_breakpoint_lemmas(cfg)
                                 : fuzz_bound_soundness(cfg, link_mode_from_name(fz_mode));
            std::string json = rep.to_json();
            if (!fz_out.empty())
                write_file(fz_out, json);
            else
                std::cout << json;
            std::cerr << rep.kind << ": " << rep.cases_run << " cases, " << rep.violations << " violations\n";
            return rep.sound() ? 0 : 1;
        }

        if (*sep) {
            SeparationReport rep = check_separation(sp_theorem, sp_k);
            std::cout << rep.to_text();
            if (!sp_out.empty()) write_file(sp_out, rep.to_json());
            std::cerr << "wall: " << rep.wall_seconds << "s\n";
            return rep.separated ? 0 : 1;
        }

        if (*regions) {
            NetworkSpec net = parse_network(read_file(rg_net));
            std::vector<long> corners;
            {
                std::stringstream ss(rg_box);
                std::string tok;
                std::vector<Rat> vals;
                while (std::getline(ss, tok, ',')) vals.push_back(rat_parse(tok));
                if (vals.size() != 4) throw CLI::ValidationError("--box", "expected x0,y0,x1,y1");
                Box2 box{Interval(vals[0], vals[2]), Interval(vals[1], vals[3])};
                RegionDecomposition dec = enumerate_regions(net, box);
                RegionBoundCheck chk = check_region_bound(net, box);
                if (!rg_out.empty()) write_file(rg_out, dec.to_json());
                if (!rg_svg.empty()) write_file(rg_svg, dec.to_svg());
                std::cout << "activation_cells=" << dec.activation_cell_count
                          << " merged_regions=" << dec.merged_region_count << " bound=" << chk.bound.get_str()
                          << " ok=" << (chk.ok ? "true" : "false") << "\n";
                return chk.ok ? 0 : 1;
            }
        }

        if (*exp) {
            Pwl f = load_function(ex_in);
            std::string text;
            if (ex_format == "csv-exact")
                text = breakpoints_csv_exact(f);
            else if (ex_format == "csv-float")
                text = breakpoints_csv_float(f);
            else if (ex_format == "json")
                text = pwl_to_json(f);
            else
                throw CLI::ValidationError("--format", "unknown format '" + ex_format + "'");
            if (!ex_out.empty())
                write_file(ex_out, text);
            else
                std::cout << text;
            return 0;
        }

        if (*suite) {
            SuiteConfig cfg;
            if (!su_config.empty()) {
                std::ifstream in(su_config);
                if (!in) {
                    std::cerr << "cannot open config " << su_config << "\n";
                    return 2;
                }
                cfg = parse_suite_config(in);
            } else if (const char* env = std::getenv("PWLNET_SEED")) {
                cfg.seed = std::strtoull(env, nullptr, 10);
            }
            SuiteResult res = run_acceptance_suite(cfg);
            for (const auto& c : res.criteria)
                std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << "criterion " << c.id << ": " << c.name << " - "
                          << c.detail << "\n";
            if (!su_out.empty()) write_file(su_out, res.summary_json);
            std::cerr << (res.all_pass ? "all criteria pass" : "criteria FAILED") << "\n";
            return res.all_pass ? 0 : 1;
        }
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

#include "pwlnet/suite.hpp"

#include "pwlnet/arrangement2d.hpp"
#include "pwlnet/bounds.hpp"
#include "pwlnet/constructions.hpp"
#include "pwlnet/verify.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <functional>
#include <random>
#include <sstream>

namespace pwlnet {

using ordered_json = nlohmann::ordered_json;

SuiteConfig parse_suite_config(std::istream& in) {
    SuiteConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto notspace = [](unsigned char c) { return !std::isspace(c); };
        line.erase(line.begin(), std::find_if(line.begin(), line.end(), notspace));
        line.erase(std::find_if(line.rbegin(), line.rend(), notspace).base(), line.end());
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        key.erase(std::find_if(key.rbegin(), key.rend(), notspace).base(), key.end());
        val.erase(val.begin(), std::find_if(val.begin(), val.end(), notspace));
        try {
            if (key == "seed")
                cfg.seed = std::stoull(val);
            else if (key == "bound_fuzz_cases")
                cfg.bound_fuzz_cases = std::stoi(val);
            else if (key == "lemma_fuzz_cases")
                cfg.lemma_fuzz_cases = std::stoi(val);
            else if (key == "rewrite_cases")
                cfg.rewrite_cases = std::stoi(val);
            else if (key == "lifted_nets")
                cfg.lifted_nets = std::stoi(val);
            else if (key == "region_nets")
                cfg.region_nets = std::stoi(val);
            else if (key == "enable_long_sawtooth")
                cfg.enable_long_sawtooth = val == "true" || val == "1";
            else
                throw config_error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        } catch (const config_error&) {
            throw;
        } catch (const std::exception&) {
            throw config_error("config line " + std::to_string(lineno) + ": bad value for '" + key + "'");
        }
    }
    return cfg;
}

namespace {

using Rng = std::mt19937_64;

long rand_long(Rng& rng, long lo, long hi) {
    return lo + static_cast<long>(rng() % static_cast<unsigned long>(hi - lo + 1));
}

Rat rand_rat(Rng& rng, long mag, long max_den = 8) {
    long den = rand_long(rng, 1, max_den);
    return rat(rand_long(rng, -mag * den, mag * den), den);
}

NetworkSpec random_layered(Rng& rng, int input_dim, int max_width, int max_depth, bool pairwise) {
    NetworkSpec net;
    net.input_dim = input_dim;
    int depth = static_cast<int>(rand_long(rng, 1, max_depth));
    int prev = input_dim;
    for (int i = 0; i < depth; ++i) {
        LayerSpec l;
        if (pairwise) {
            l.width = 2 * static_cast<int>(rand_long(rng, 1, max_width / 2));
            l.link_group = 2;
        } else {
            l.width = static_cast<int>(rand_long(rng, 1, max_width));
            l.link_group = 1;
        }
        for (int j = 0; j < l.width; ++j) {
            std::vector<Rat> row;
            for (int m = 0; m < prev; ++m) row.push_back(rand_rat(rng, 4));
            l.weights.push_back(std::move(row));
            l.biases.push_back(rand_rat(rng, 4));
        }
        prev = l.width;
        net.layers.push_back(std::move(l));
    }
    for (int m = 0; m < prev; ++m) net.output.coeffs.push_back(rand_rat(rng, 4));
    net.output.bias = rand_rat(rng, 4);
    return net;
}

struct Check {
    std::ostringstream detail;
    bool ok = true;

    template <typename A, typename B>
    void equal(const char* label, const A& got, const B& want) {
        bool good = got == want;
        ok = ok && good;
        detail << label << "=" << got << (good ? "" : "(MISMATCH)") << " ";
    }
    void at_least(const char* label, long got, const Int& want) {
        bool good = Int(got) >= want;
        ok = ok && good;
        detail << label << "=" << got << (good ? "" : "(TOO FEW)") << " ";
    }
    void truthy(const char* label, bool good) {
        ok = ok && good;
        detail << label << "=" << (good ? "yes" : "NO") << " ";
    }
};

std::vector<CriterionResult> run_criteria(const SuiteConfig& cfg) {
    std::vector<CriterionResult> out;
    auto run = [&](int id, const std::string& name, double limit, const std::function<void(Check&)>& body) {
        CriterionResult r;
        r.id = id;
        r.name = name;
        r.limit_seconds = limit;
        Check chk;
        auto t0 = std::chrono::steady_clock::now();
        try {
            body(chk);
        } catch (const std::exception& e) {
            chk.ok = false;
            chk.detail << "exception: " << e.what();
        }
        r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.pass = chk.ok && r.wall_seconds < limit;
        r.detail = chk.detail.str();
        if (chk.ok && r.wall_seconds >= limit) r.detail += "(OVER TIME LIMIT)";
        out.push_back(std::move(r));
    };

    run(1, "feedforward tightness", 1.0, [&](Check& c) {
        c.equal("twoproduct_3_2", exact_pieces(gen_twoproduct(3, 2)), 12);
        c.equal("deep_3_3", exact_pieces(gen_width3_4k(3, 3)), 64);
    });

    run(2, "linked two-layer tightness", 1.0, [&](Check& c) {
        long pieces = exact_pieces(gen_intra_twolayer(6, 4));
        c.equal("intra_twolayer_6_4", pieces, 70);
        c.truthy("matches_bound",
                 Int(pieces) == piece_upper_bound(ArchShape::uniform({6, 4}, LinkMode::pairwise)).upper);
    });

    run(3, "sawtooth catalog", 5.0, [&](Check& c) {
        c.equal("linked_sawtooth_4", exact_pieces(gen_intra_sawtooth({4})), 6);
        c.equal("linked_sawtooth_4_4", exact_pieces(gen_intra_sawtooth({4, 4})), 36);
        ConstructionResult rs = gen_resnet_sawtooth(10);
        c.equal("resnet_10", exact_pieces(rs), 1024);
        c.truthy("resnet_sawtooth_shape",
                 rs.sawtooth && is_sawtooth(forward_symbolic(rs.net), rs.sawtooth->pieces, rs.sawtooth->interval));
        c.at_least("width2_chain_5", exact_pieces(gen_width2_intra(5)), Int(191));
        c.equal("all_linked_one_layer_6", exact_pieces(gen_all_linked_onelayer(6)), 22);
        c.at_least("all_linked_width4_2", exact_pieces(gen_all_linked_9k(2)), Int(81));
        c.at_least("dense_3_3", exact_pieces(gen_densenet({3, 3})), Int(50));
    });

    run(4, "bound and lemma fuzz", 60.0, [&](Check& c) {
        FuzzConfig fcfg;
        fcfg.seed = cfg.seed;
        fcfg.cases = cfg.bound_fuzz_cases;
        fcfg.max_width = 6;
        fcfg.max_depth = 4;
        FuzzReport ff = fuzz_bound_soundness(fcfg, LinkMode::feedforward);
        c.equal("feedforward_violations", ff.violations, 0);
        FuzzReport in = fuzz_bound_soundness(fcfg, LinkMode::pairwise);
        c.equal("pairwise_violations", in.violations, 0);
        FuzzConfig lcfg;
        lcfg.seed = cfg.seed;
        lcfg.cases = cfg.lemma_fuzz_cases;
        FuzzReport lem = fuzz_breakpoint_lemmas(lcfg);
        c.equal("lemma_violations", lem.violations, 0);
    });

    run(5, "depth separations", 30.0, [&](Check& c) {
        SeparationReport a = check_separation("k2_vs_2", 3);
        c.equal("one_layer_intra", a.shallow_intra_pieces.get_str(), std::string("22"));
        c.equal("one_layer_bound", a.shallow_ff_bound.get_str(), std::string("8"));
        c.truthy("one_layer_separated", a.separated);
        SeparationReport b = check_separation("k2_vs_3", 10);
        c.equal("two_layer_intra", b.shallow_intra_pieces.get_str(), std::string("100"));
        c.equal("two_layer_bound", b.shallow_ff_bound.get_str(), std::string("81"));
        c.truthy("two_layer_separated", b.separated);
        SeparationReport d = check_separation("k2_vs_k", 2);
        c.equal("sawtooth_deep", d.deep_pieces.get_str(), std::string("1296"));
        c.equal("sawtooth_intra", d.shallow_intra_pieces.get_str(), std::string("1296"));
        c.equal("sawtooth_bound", d.shallow_ff_bound.get_str(), std::string("1225"));
        c.truthy("sawtooth_separated", d.separated);
        c.truthy("sawtooth_function_match", d.functions_match);
        if (cfg.enable_long_sawtooth) {
            SeparationReport e = check_separation("k2_vs_k", 3);
            c.truthy("sawtooth_k3_separated", e.separated);
        }
    });

    run(6, "first-layer rewrite", 10.0, [&](Check& c) {
        Rng rng(cfg.seed ^ 0x5eedf00dULL);
        int done = 0, attempts = 0, failures = 0;
        while (done < cfg.rewrite_cases && attempts < cfg.rewrite_cases * 50) {
            ++attempts;
            NetworkSpec net = random_layered(rng, 1, 4, 2, false);
            if (net.layers[0].width < 2) continue;
            try {
                NetworkSpec linked = rewrite_first_layer_linked(net);
                if (!equals(forward_symbolic(net), forward_symbolic(linked))) ++failures;
                ++done;
            } catch (const not_applicable_error&) {
            }
        }
        c.equal("cases", done, cfg.rewrite_cases);
        c.equal("mismatches", failures, 0);
    });

    run(7, "2-D region census", 120.0, [&](Check& c) {
        Rng rng(cfg.seed ^ 0xa11bea75ULL);

        int lift_fail = 0;
        for (int i = 0; i < cfg.lifted_nets; ++i) {
            NetworkSpec net1 = random_layered(rng, 1, 4, 2, i % 2 == 0);
            NetworkSpec net2 = net1;
            net2.input_dim = 2;
            for (auto& row : net2.layers[0].weights) row.push_back(rat(0));
            Pwl f = forward_symbolic(net1);
            Rat bound(2);
            for (const auto& b : f.breakpoints()) {
                Rat a = abs(b.x);
                if (a >= bound) bound = Rat(a + 1);
            }
            Box2 box{Interval(Rat(-bound), bound), Interval(rat(-1), rat(1))};
            if (enumerate_regions(net2, box).merged_region_count != analyze(f).pieces) ++lift_fail;
        }
        c.equal("lifted_mismatches", lift_fail, 0);

        int bound_fail = 0;
        Box2 unit{Interval(rat(-1), rat(1)), Interval(rat(-1), rat(1))};
        for (int i = 0; i < cfg.region_nets; ++i) {
            NetworkSpec net = random_layered(rng, 2, 4, 2, i % 2 == 0);
            if (!check_region_bound(net, unit).ok) ++bound_fail;
        }
        c.equal("bound_violations", bound_fail, 0);

        NetworkSpec generic;
        generic.input_dim = 2;
        LayerSpec l;
        l.width = 4;
        l.link_group = 1;
        l.weights = {{rat(1), rat(0)}, {rat(0), rat(1)}, {rat(1), rat(1)}, {rat(1), rat(-1)}};
        l.biases = {rat(0), rat(0), rat(-1, 2), rat(1, 4)};
        generic.layers.push_back(std::move(l));
        generic.output.coeffs = {rat(1), rat(1, 2), rat(1, 4), rat(1, 8)};
        c.equal("generic_width4_regions", enumerate_regions(generic, unit).merged_region_count, 11);
    });

    return out;
}

std::string summary_json(const SuiteConfig& cfg, const std::vector<CriterionResult>& criteria, bool all_pass) {
    ordered_json j;
    j["seed"] = cfg.seed;
    j["criteria"] = ordered_json::array();
    for (const auto& c : criteria) {
        ordered_json cj;
        cj["id"] = c.id;
        cj["name"] = c.name;
        cj["pass"] = c.pass;
        cj["detail"] = c.detail;
        j["criteria"].push_back(std::move(cj));
    }
    j["all_pass"] = all_pass;
    return j.dump(2) + "\n";
}

} // namespace

SuiteResult run_acceptance_suite(const SuiteConfig& cfg) {
    SuiteResult res;
    res.criteria = run_criteria(cfg);

    // byte-stability: the whole battery rerun with the same seed must summarize identically
    CriterionResult det;
    det.id = 8;
    det.name = "determinism";
    det.limit_seconds = 300.0;
    auto t0 = std::chrono::steady_clock::now();
    bool prior_ok = true;
    for (const auto& c : res.criteria) prior_ok = prior_ok && c.pass;
    std::string first = summary_json(cfg, res.criteria, prior_ok);
    std::vector<CriterionResult> again = run_criteria(cfg);
    bool again_ok = true;
    for (const auto& c : again) again_ok = again_ok && c.pass;
    std::string second = summary_json(cfg, again, again_ok);
    det.pass = first == second;
    det.detail = det.pass ? "summaries byte-identical" : "summaries differ";
    det.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.criteria.push_back(det);

    res.all_pass = true;
    for (const auto& c : res.criteria) res.all_pass = res.all_pass && c.pass;
    res.summary_json = summary_json(cfg, res.criteria, res.all_pass);
    return res;
}

} // namespace pwlnet

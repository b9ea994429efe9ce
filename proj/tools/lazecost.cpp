#include "lzc/infer.hpp"
#include "lzc/interp.hpp"
#include "lzc/parser.hpp"
#include "lzc/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace lzc;

struct Options {
    std::string file;
    std::string all_dir;
    std::string cost = "alloc";
    std::string main_override;
    std::vector<std::string> demands;
    std::string dump_lp, dump_derivation;
    bool legacy_lower_thunks = false;
    std::string format = "text";
};

enum ExitCode { kOk = 0, kTypeError = 1, kInfeasible = 2, kUnsound = 3 };

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<Demand> parse_demands(const Options& opt) {
    std::vector<Demand> out;
    for (const auto& s : opt.demands) {
        auto d = Demand::parse(s);
        if (!d) throw std::runtime_error("bad demand '" + s + "' (whnf, spine:N, elems:N)");
        out.push_back(*d);
    }
    return out;
}

int run_one(const std::string& mode, const std::string& path, const Options& opt,
            const CostModel& cm, Report& rep) {
    rep.mode = mode;
    rep.file = path;
    rep.status = "ok";
    Module m;
    try {
        m = parse_module(read_file(path));
        if (!opt.main_override.empty()) {
            m.main = opt.main_override;
            bool found = false;
            for (const auto& g : m.binds)
                for (const auto& [n, _] : g.binds)
                    if (n == m.main) found = true;
            if (!found) throw ParseError({}, "main binding '" + m.main + "' is not defined");
        }
        rep.main = m.main;
    } catch (const ParseError& pe) {
        rep.status = "type-error";
        rep.failure_kind = "parse";
        rep.failure_message = pe.what();
        return kTypeError;
    }

    InferOptions iopt;
    iopt.legacy_lower_thunks = opt.legacy_lower_thunks;

    if (mode == "measure") {
        Demand d = Demand::whnf();
        auto ds = parse_demands(opt);
        if (ds.size() > 1) throw std::runtime_error("measure takes at most one --demand");
        if (!ds.empty()) d = ds[0];
        try {
            rep.counts = eval_demand(m, module_to_expr(m), cm, d);
            rep.counts_total = rep.counts.total(cm);
            rep.has_counts = true;
        } catch (const EvalError& ee) {
            rep.status = "eval-error";
            rep.failure_kind = "eval";
            rep.failure_message = ee.what();
            return kTypeError;
        }
        return kOk;
    }

    AnalysisResult res;
    try {
        res = analyze(m, cm, iopt);
    } catch (const TypeError& te) {
        rep.status = "type-error";
        rep.failure_kind = "type";
        rep.failure_message = te.what();
        rep.failure_trace = te.trace;
        return kTypeError;
    }
    if (!opt.dump_lp.empty()) {
        std::ofstream out(opt.dump_lp);
        dump_cplex(res.lp, out);
    }
    if (!opt.dump_derivation.empty()) {
        std::ofstream out(opt.dump_derivation);
        dump_derivation(*res.derivation, out,
                        res.ok() ? &res.solution : nullptr);
    }
    if (!res.ok()) {
        rep.status = "infeasible";
        rep.failure_kind = "lp";
        rep.failure_message = "linear program infeasible";
        return kInfeasible;
    }
    rep.has_typing = true;
    rep.typing = print_anntype(res.solved_type);
    rep.upper = res.upper_value;
    rep.lower = res.lower_value;

    if (mode == "analyze") return kOk;

    // check: compare demand bounds against measured costs
    auto ds = parse_demands(opt);
    if (ds.empty()) throw std::runtime_error("check needs at least one --demand");
    bool sound = true;
    for (const auto& d : ds) {
        CheckRow row;
        row.demand = d.show();
        try {
            row.bound = aggregate_bound(res.solved_type, res.upper_value, d);
            row.measured = eval_demand(m, module_to_expr(m), cm, d).total(cm);
        } catch (const EvalError& ee) {
            rep.status = ee.kind == EvalError::Kind::Shape ? "shape-error" : "eval-error";
            rep.failure_kind = "eval";
            rep.failure_message = ee.what();
            return kTypeError;
        }
        row.ok = row.measured <= row.bound;
        sound = sound && row.ok;
        rep.table.push_back(row);
    }
    if (!sound) {
        rep.status = "unsound";
        return kUnsound;
    }
    return kOk;
}

int run(const std::string& mode, const Options& opt) {
    auto cm = parse_cost_model(opt.cost);
    if (!cm) {
        std::cerr << "bad cost model '" << opt.cost << "'\n";
        return kTypeError;
    }
    std::vector<std::string> files;
    if (!opt.all_dir.empty()) {
        for (const auto& entry : std::filesystem::directory_iterator(opt.all_dir))
            if (entry.path().extension() == ".lzc") files.push_back(entry.path().string());
        std::sort(files.begin(), files.end());
        if (files.empty()) {
            std::cerr << "no .lzc files in " << opt.all_dir << "\n";
            return kTypeError;
        }
    } else {
        files.push_back(opt.file);
    }
    int worst = kOk;
    for (const auto& f : files) {
        Report rep;
        int code = kOk;
        try {
            code = run_one(mode, f, opt, *cm, rep);
        } catch (const std::exception& ex) {
            std::cerr << ex.what() << "\n";
            return kTypeError;
        }
        if (files.size() > 1 && opt.format == "text") std::cout << "== " << f << "\n";
        std::cout << (opt.format == "json" ? rep.to_json() : rep.to_text());
        worst = std::max(worst, code);
    }
    return worst;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lazecost -- amortized resource analysis for a lazy core language"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* sub, bool needs_file) {
        if (needs_file) {
            sub->add_option("file", opt.file, "module to process (.lzc)");
            sub->add_option("--all", opt.all_dir, "process every .lzc file in a directory");
        }
        sub->add_option("--cost", opt.cost, "cost model: alloc | steps | zero | k=v,...");
        sub->add_option("--main", opt.main_override, "binding to analyze");
        sub->add_option("--format", opt.format, "output format: text | json")
            ->check(CLI::IsMember({"text", "json"}));
    };

    CLI::App* analyze = app.add_subcommand("analyze", "derive an annotated typing");
    add_common(analyze, true);
    analyze->add_option("--dump-lp", opt.dump_lp, "write the linear program (CPLEX-LP format)");
    analyze->add_option("--dump-derivation", opt.dump_derivation, "write the derivation tree");
    analyze->add_flag("--legacy-lower-thunks", opt.legacy_lower_thunks,
                      "re-enable the relaxed letrec view (documented as unsound)");

    CLI::App* measure = app.add_subcommand("measure", "run the interpreter and count costs");
    add_common(measure, true);
    measure->add_option("--demand", opt.demands, "demand: whnf | spine:N | elems:N");

    CLI::App* check = app.add_subcommand("check", "analyze, then compare bounds to measured costs");
    add_common(check, true);
    check->add_option("--demand", opt.demands, "demand: whnf | spine:N | elems:N")->required();
    check->add_option("--dump-lp", opt.dump_lp, "write the linear program (CPLEX-LP format)");
    check->add_option("--dump-derivation", opt.dump_derivation, "write the derivation tree");
    check->add_flag("--legacy-lower-thunks", opt.legacy_lower_thunks,
                    "re-enable the relaxed letrec view (documented as unsound)");

    CLI11_PARSE(app, argc, argv);

    std::string mode = app.get_subcommands()[0]->get_name();
    if (opt.file.empty() && opt.all_dir.empty()) {
        std::cerr << "a file (or --all DIR) is required\n";
        return kTypeError;
    }
    return run(mode, opt);
}

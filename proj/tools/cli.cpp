#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "hauto/automaton.hpp"
#include "hauto/entailment.hpp"
#include "hauto/model.hpp"
#include "hauto/parser.hpp"

namespace hauto::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct InputFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string trim(std::string s) {
    auto ws = [](unsigned char c) { return std::isspace(c); };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
    return s;
}

std::uint32_t var_index(std::string t) {
    t = trim(t);
    if (t == "nil") return 0;
    if (!t.empty() && t[0] == 'x') t = t.substr(1);
    try {
        std::size_t used = 0;
        auto v = std::stoul(t, &used);
        if (used == t.size() && v > 0) return static_cast<std::uint32_t>(v);
    } catch (const std::exception&) {
    }
    throw InputFailure("bad variable '" + t + "' in property");
}

Var as_var(std::uint32_t i) { return i == 0 ? Var::nil() : Var::free(i); }

struct Target {
    Sid sid;
    SymbolicHeap phi;
    std::string label;
};

Sid load_sid(const std::string& path, SidDocument* doc_out = nullptr) {
    auto doc = load_document(path);
    auto diags = validate_sid(doc.sid);
    if (!diags.empty()) throw InputFailure(path + ": " + diags.front().message);
    if (doc_out) *doc_out = doc;
    return doc.sid;
}

SymbolicHeap load_query(const std::string& path, Sid& sid) {
    auto doc = load_document(path, &sid);
    for (auto& name : doc.sid.order) {
        if (sid.has(name)) throw InputFailure(path + ": predicate " + name + " is already defined");
        for (auto& r : doc.sid.at(name).rules) sid.add_rule(name, doc.sid.at(name).arity, r);
        sid.declare(name, doc.sid.at(name).arity);
    }
    if (!doc.query) throw InputFailure(path + ": no query declaration");
    auto diags = validate_heap(sid, *doc.query);
    if (!diags.empty()) throw InputFailure(path + ": " + diags.front().message);
    return *doc.query;
}

Target resolve_target(const std::string& sid_path, const std::string& pred, const std::string& formula) {
    SidDocument doc;
    Target t;
    t.sid = load_sid(sid_path, &doc);
    if (!pred.empty() && !formula.empty()) throw InputFailure("--pred and --formula are mutually exclusive");
    if (!pred.empty()) {
        if (!t.sid.has(pred)) throw InputFailure("unknown predicate " + pred);
        t.phi = call_heap(pred, t.sid.at(pred).arity);
        t.label = pred;
    } else if (!formula.empty()) {
        t.phi = load_query(formula, t.sid);
        t.label = formula;
    } else if (doc.query) {
        t.phi = *doc.query;
        t.label = "query";
    } else {
        throw InputFailure("nothing to analyze: give --pred, --formula, or a query declaration");
    }
    return t;
}

Mode parse_mode(const std::string& m) {
    if (m == "forall") return Mode::ForAll;
    if (m == "exists") return Mode::Exists;
    throw InputFailure("unknown mode " + m);
}

struct Report {
    std::string file, command, verdict;
    std::size_t states = 0;
    double millis = 0;

    json to_json() const {
        return {{"file", file}, {"command", command}, {"verdict", verdict}, {"states_discovered", states},
                {"millis", millis}};
    }
};

class Clock {
public:
    double millis() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int emit(const Report& r, bool as_json, std::ostream& out, const std::string& details = {}) {
    if (as_json)
        out << r.to_json().dump() << '\n';
    else
        out << r.verdict << '\n' << details;
    return r.verdict == "holds" || r.verdict == "agree" || r.verdict == "done" ? Holds : Fails;
}

Report bench_one(const fs::path& file, const PropertySpec& spec, Mode mode) {
    Report r{file.filename().string(), "bench", "", 0, 0};
    Clock c;
    try {
        SidDocument doc;
        auto sid = load_sid(file.string(), &doc);
        SymbolicHeap phi;
        if (doc.query)
            phi = *doc.query;
        else if (!sid.order.empty())
            phi = call_heap(sid.order.front(), sid.at(sid.order.front()).arity);
        else
            throw InputFailure("empty file");
        auto res = evaluate_property(sid, phi, spec, mode);
        r.verdict = res.holds ? "holds" : "fails";
        r.states = res.states_discovered;
    } catch (const std::exception& e) {
        r.verdict = std::string("error: ") + e.what();
    }
    r.millis = c.millis();
    return r;
}

}  // namespace

PropertySpec parse_property(const std::string& text) {
    using K = PropertySpec;
    static const std::map<std::string, K::Kind> simple{
        {"sat", K::Sat},          {"unsat", K::Unsat},     {"est", K::Established}, {"non-est", K::NotEstablished},
        {"gf", K::GarbageFree},   {"non-gf", K::NotGarbageFree}, {"acyc", K::WeaklyAcyclic},
        {"non-acyc", K::NotWeaklyAcyclic}, {"has-pts", K::HasPointsTo}};
    if (auto it = simple.find(text); it != simple.end()) return K::of(it->second);
    if (text.rfind("track=", 0) == 0) {
        auto spec = K::of(K::Track);
        auto body = text.substr(6);
        auto semi = body.find(';');
        for (auto& a : split(body.substr(0, semi), ',')) spec.alloc.push_back(var_index(a));
        if (semi != std::string::npos) {
            for (auto& atom : split(body.substr(semi + 1), ',')) {
                auto ne = atom.find("!=");
                auto eq = atom.find('=');
                if (ne != std::string::npos)
                    spec.pure.push_back(PureAtom::make(as_var(var_index(atom.substr(0, ne))),
                                                       as_var(var_index(atom.substr(ne + 2))), false));
                else if (eq != std::string::npos)
                    spec.pure.push_back(PureAtom::make(as_var(var_index(atom.substr(0, eq))),
                                                       as_var(var_index(atom.substr(eq + 1))), true));
                else
                    throw InputFailure("bad pure atom '" + atom + "' in track property");
            }
        }
        return spec;
    }
    if (text.rfind("reach=", 0) == 0 || text.rfind("reaches=", 0) == 0) {
        auto spec = K::of(K::Reach);
        spec.reach_superset = text[5] == 'e';
        for (auto& p : split(text.substr(text.find('=') + 1), ',')) {
            auto gt = p.find('>');
            if (gt == std::string::npos) throw InputFailure("bad reach pair '" + p + "', expected a>b");
            spec.reach.emplace_back(var_index(p.substr(0, gt)), var_index(p.substr(gt + 1)));
        }
        return spec;
    }
    throw InputFailure("unknown property '" + text + "'");
}

const char* const kPropertyHelp =
    "sat | unsat | est | non-est | gf | non-gf | acyc | non-acyc | has-pts | "
    "track=x1,x2;x1!=x2 (allocated; pure) | reach=x1>x2,.. (exact) | reaches=x1>x2,.. (at least)";

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Heap automata for symbolic-heap separation logic"};
    app.require_subcommand(1);

    std::string sid_path, prop = "sat", mode = "exists", pred, formula, output, lhs, rhs, autom, dir, json_out;
    bool as_json = false, strict = false;
    std::size_t max_height = 4;
    unsigned jobs = 0;

    auto target_opts = [&](CLI::App* c) {
        c->add_option("sid", sid_path, "SID file (.hrs)")->required();
        c->add_option("--prop", prop, kPropertyHelp)->required();
        c->add_option("--pred", pred, "predicate to analyze");
        c->add_option("--formula", formula, "file with a query declaration");
        c->add_flag("--json", as_json, "print a JSON report");
    };
    auto* analyze = app.add_subcommand("analyze", "decide a robustness property");
    target_opts(analyze);
    analyze->add_option("--mode", mode, "forall or exists")->check(CLI::IsMember({"forall", "exists"}));

    auto* refine_cmd = app.add_subcommand("refine", "refine the SID against a property automaton");
    refine_cmd->add_option("sid", sid_path, "SID file (.hrs)")->required();
    refine_cmd->add_option("--prop", prop, kPropertyHelp)->required();
    refine_cmd->add_option("-o,--output", output, "write the refined SID here instead of stdout");
    refine_cmd->add_flag("--json", as_json, "print a JSON report");

    auto* witness = app.add_subcommand("witness", "print an unfolding with the property");
    target_opts(witness);

    auto* entail = app.add_subcommand("entail", "decide an entailment between two queries");
    entail->add_option("sid", sid_path, "SID file (.hrs)")->required();
    entail->add_option("--lhs", lhs, "file with the left-hand query")->required();
    entail->add_option("--rhs", rhs, "file with the right-hand query")->required();
    entail->add_option("--auto", autom, "sll or mn=CLASSFILE")->required();
    entail->add_flag("--strict", strict, "reject queries whose sampled unfoldings are not determined");
    entail->add_flag("--json", as_json, "print a JSON report");

    auto* oracle = app.add_subcommand("oracle", "cross-check the automaton against unfolding enumeration");
    target_opts(oracle);
    oracle->add_option("--mode", mode, "forall or exists")->check(CLI::IsMember({"forall", "exists"}));
    oracle->add_option("--max-height", max_height, "enumeration height");

    auto* bench = app.add_subcommand("bench", "analyze every .hrs file of a directory");
    bench->add_option("dir", dir, "directory")->required();
    bench->add_option("--json", json_out, "write reports here");
    bench->add_option("--prop", prop, kPropertyHelp);
    bench->add_option("--mode", mode, "forall or exists")->check(CLI::IsMember({"forall", "exists"}));
    bench->add_option("--jobs", jobs, "worker threads (0: one per file)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << e.what() << '\n';
        return InputError;
    }

    try {
        Clock clock;
        if (analyze->parsed()) {
            auto t = resolve_target(sid_path, pred, formula);
            auto res = evaluate_property(t.sid, t.phi, parse_property(prop), parse_mode(mode));
            Report r{sid_path, "analyze", res.holds ? "holds" : "fails", res.states_discovered, clock.millis()};
            return emit(r, as_json, out);
        }
        if (refine_cmd->parsed()) {
            auto sid = load_sid(sid_path);
            auto a = build_property_automaton(parse_property(prop), std::max<std::uint32_t>(1, sid.max_arity()));
            auto res = refine(sid, *a);
            auto text = print_sid(res.sid);
            if (!output.empty()) {
                std::ofstream f(output);
                if (!f) throw InputFailure("cannot write " + output);
                f << text;
            }
            Report r{sid_path, "refine", "done", res.states_discovered, clock.millis()};
            return emit(r, as_json, out, output.empty() ? text : std::string());
        }
        if (witness->parsed()) {
            auto t = resolve_target(sid_path, pred, formula);
            auto a = build_property_automaton(parse_property(prop), query_alpha(t.sid, t.phi));
            auto p = wrap_formula(t.sid, t.phi);
            auto nr = decide_nonempty(t.sid, p, *a);
            auto tree = witness_from(t.sid, p, *a, nr);
            Report r{sid_path, "witness", tree ? "holds" : "fails", nr.states_discovered(), clock.millis()};
            std::string details;
            if (tree) details = to_string(*tree, t.sid) + "unfolding: " + to_string(canonicalize(unfold(t.sid, *tree))) + "\n";
            if (as_json && tree) {
                auto j = r.to_json();
                j["tree"] = to_string(*tree, t.sid);
                j["unfolding"] = to_string(canonicalize(unfold(t.sid, *tree)));
                out << j.dump() << '\n';
                return Holds;
            }
            return emit(r, as_json, out, details);
        }
        if (entail->parsed()) {
            EntailmentQuery q;
            q.sid = load_sid(sid_path);
            q.lhs = load_query(lhs, q.sid);
            q.rhs = load_query(rhs, q.sid);
            q.strict = strict;
            AutomatonPtr a;
            if (autom == "sll") {
                a = sll_entailment_automaton();
            } else if (autom.rfind("mn=", 0) == 0) {
                auto doc = load_document(autom.substr(3));
                a = myhill_nerode_automaton(std::make_shared<EquivalenceClassSpec>(doc.sid, doc.annotations));
            } else {
                throw InputFailure("unknown automaton '" + autom + "', expected sll or mn=FILE");
            }
            for (auto& c : q.rhs.calls) q.pred_automata[c.pred] = a;
            auto res = decide_entailment(q);
            Report r{sid_path, "entail", res.holds ? "holds" : "fails", res.states_discovered, clock.millis()};
            return emit(r, as_json, out);
        }
        if (oracle->parsed()) {
            auto t = resolve_target(sid_path, pred, formula);
            auto spec = parse_property(prop);
            auto m = parse_mode(mode);
            auto res = evaluate_property(t.sid, t.phi, spec, m);
            bool o = oracle_property(t.sid, t.phi, spec, m, max_height);
            Report r{sid_path, "oracle", res.holds == o ? "agree" : "disagree", res.states_discovered, clock.millis()};
            std::string details = std::string("automaton: ") + (res.holds ? "holds" : "fails") +
                                  "\noracle: " + (o ? "holds" : "fails") + "\n";
            return emit(r, as_json, out, details);
        }
        if (bench->parsed()) {
            if (!fs::is_directory(dir)) throw InputFailure(dir + " is not a directory");
            std::vector<fs::path> files;
            for (auto& e : fs::directory_iterator(dir))
                if (e.is_regular_file() && e.path().extension() == ".hrs") files.push_back(e.path());
            std::sort(files.begin(), files.end());
            auto spec = parse_property(prop);
            auto m = parse_mode(mode);
            std::vector<Report> reports(files.size());
            std::size_t width = jobs ? jobs : std::max<std::size_t>(1, files.size());
            for (std::size_t lo = 0; lo < files.size(); lo += width) {
                std::vector<std::future<Report>> fut;
                for (std::size_t i = lo; i < std::min(files.size(), lo + width); ++i)
                    fut.push_back(std::async(std::launch::async, bench_one, files[i], spec, m));
                for (std::size_t i = 0; i < fut.size(); ++i) reports[lo + i] = fut[i].get();
            }
            json arr = json::array();
            double total = 0;
            for (auto& r : reports) {
                arr.push_back(r.to_json());
                total += r.millis;
                out << r.file << '\t' << r.verdict << '\t' << r.states << '\t' << r.millis << " ms\n";
            }
            out << "total\t" << reports.size() << " files\t" << total << " ms\n";
            if (!json_out.empty()) {
                std::ofstream f(json_out);
                if (!f) throw InputFailure("cannot write " + json_out);
                f << arr.dump(2) << '\n';
            }
            bool errors = std::any_of(reports.begin(), reports.end(),
                                      [](const Report& r) { return r.verdict.rfind("error", 0) == 0; });
            return errors ? InputError : Holds;
        }
    } catch (const ParseError& e) {
        err << e.what() << '\n';
        return InputError;
    } catch (const InputFailure& e) {
        err << e.what() << '\n';
        return InputError;
    } catch (const ModelError& e) {
        err << e.what() << '\n';
        return InputError;
    } catch (const AlphaViolation& e) {
        err << e.what() << '\n';
        return InputError;
    } catch (const PreconditionError& e) {
        err << "precondition failed: " << e.what() << '\n';
        return PreconditionFailed;
    } catch (const std::invalid_argument& e) {
        err << e.what() << '\n';
        return InputError;
    }
    return InputError;
}

}  // namespace hauto::cli

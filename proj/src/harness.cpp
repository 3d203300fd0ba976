#include "rlnc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <omp.h>

#include <json.hpp>

#include "rlnc/rng.hpp"
#include "rlnc/sim.hpp"

namespace rlnc {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string fmt_double(double v, const char* format = "%.17g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

std::string variant_name(Variant v) {
    return v == Variant::systematic ? "systematic" : "non-systematic";
}

Variant parse_variant(const std::string& s) {
    if (s == "systematic") return Variant::systematic;
    if (s == "non-systematic" || s == "nonsystematic" || s == "non_systematic") {
        return Variant::non_systematic;
    }
    throw std::invalid_argument("unknown variant: " + s);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad number: " + s);
    return v;
}

}  // namespace

NetworkSpec heterogeneous_epsilons(int users, double lo, double hi) {
    if (users < 1) throw std::invalid_argument("need >= 1 user");
    if (!(lo <= hi)) throw std::invalid_argument("need lo <= hi");
    if (users == 1 && lo != hi) {
        throw std::invalid_argument("single user cannot span an epsilon range");
    }
    NetworkSpec net;
    net.eps.resize(users);
    for (int j = 0; j < users; ++j) {
        net.eps[j] = users == 1 ? lo : lo + (hi - lo) * double(j) / double(users - 1);
    }
    if (users > 1) net.eps[users - 1] = hi;
    net.validate();
    return net;
}

namespace {

void require_probability(double v) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("epsilon outside [0, 1]: " + fmt_double(v, "%g"));
    }
}

}  // namespace

EpsSpec EpsSpec::scalar(double v) {
    require_probability(v);
    EpsSpec e;
    e.mode = Mode::scalar;
    e.values = {v};
    return e;
}

EpsSpec EpsSpec::list(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("empty epsilon list");
    for (double x : v) require_probability(x);
    EpsSpec e;
    e.mode = Mode::list;
    e.values = std::move(v);
    return e;
}

EpsSpec EpsSpec::linspace(double lo, double hi) {
    require_probability(lo);
    require_probability(hi);
    if (!(lo <= hi)) throw std::invalid_argument("need lo <= hi");
    EpsSpec e;
    e.mode = Mode::linspace;
    e.lo = lo;
    e.hi = hi;
    return e;
}

EpsSpec EpsSpec::parse(const std::string& text) {
    if (text.rfind("linspace:", 0) == 0) {
        const auto parts = split(text.substr(9), ':');
        if (parts.size() != 2) {
            throw std::invalid_argument("expected linspace:lo:hi, got " + text);
        }
        return linspace(parse_double(parts[0]), parse_double(parts[1]));
    }
    const char sep = text.find(';') != std::string::npos ? ';'
                     : text.find(',') != std::string::npos ? ','
                                                           : '\0';
    if (sep) {
        std::vector<double> vals;
        for (const auto& p : split(text, sep)) vals.push_back(parse_double(p));
        return list(std::move(vals));
    }
    return scalar(parse_double(text));
}

std::string EpsSpec::to_string() const {
    switch (mode) {
        case Mode::scalar:
            return fmt_double(values[0], "%g");
        case Mode::linspace:
            return "linspace:" + fmt_double(lo, "%g") + ":" + fmt_double(hi, "%g");
        default: {
            std::string out;
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (i) out += ';';
                out += fmt_double(values[i], "%g");
            }
            return out;
        }
    }
}

NetworkSpec EpsSpec::resolve(int users) const {
    if (users < 1) throw std::invalid_argument("need >= 1 user");
    NetworkSpec net;
    switch (mode) {
        case Mode::scalar:
            net.eps.assign(users, values[0]);
            break;
        case Mode::linspace:
            return heterogeneous_epsilons(users, lo, hi);
        default:
            if (int(values.size()) != users) {
                throw std::invalid_argument("epsilon list length != user count");
            }
            net.eps = values;
            break;
    }
    net.validate();
    return net;
}

void ExperimentConfig::validate() const {
    if (L_values.empty()) throw std::invalid_argument("no user counts");
    for (int l : L_values) {
        if (l < 1) throw std::invalid_argument("user count must be >= 1");
    }
    if (K < 1) throw std::invalid_argument("K must be >= 1");
    if (q < 2) throw std::invalid_argument("q must be >= 2");
    if (n_lo() < K) throw std::invalid_argument("N range must start at >= K");
    if (n_hi() < n_lo()) throw std::invalid_argument("empty N range");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (threads < 0) throw std::invalid_argument("negative thread count");
    if (methods.empty()) throw std::invalid_argument("no bound methods selected");
    for (const auto& m : methods) {
        if (m != "product" && m != "theorem1" && m != "exact2") {
            throw std::invalid_argument("unknown method: " + m);
        }
    }
}

double ResultRow::bound(const std::string& method) const {
    for (const auto& [name, value] : bounds) {
        if (name == method) return value;
    }
    return kNan;
}

double ResultRow::gap(const std::string& method) const { return bound(method) - sim_mean; }

namespace {

struct RowTask {
    int L, N;
    std::size_t index;
};

ResultRow evaluate_row(const ExperimentConfig& cfg, int L, int N, std::uint64_t row_seed,
                       std::vector<std::string>& notes) {
    ResultRow row;
    row.L = L;
    row.K = cfg.K;
    row.N = N;
    row.q = cfg.q;
    row.variant = cfg.variant;
    row.eps_spec = cfg.eps.to_string();
    row.trials = cfg.trials;
    row.seed = cfg.seed;

    const CodeSpec code{N, cfg.K, cfg.q, cfg.variant};
    const NetworkSpec net = cfg.eps.resolve(L);
    const auto context = [&] {
        return "L=" + std::to_string(L) + " K=" + std::to_string(cfg.K) +
               " N=" + std::to_string(N) + " q=" + std::to_string(cfg.q) + " " +
               variant_name(cfg.variant);
    };

    for (const auto& method : cfg.methods) {
        double v = kNan;
        try {
            if (method == "product") {
                v = product_bound(code, net);
            } else if (method == "theorem1") {
                if (cfg.variant == Variant::non_systematic) {
                    v = multicast_bound(code, net).value;
                } else {
                    notes.push_back("theorem1 skipped (systematic variant) at " + context());
                }
            } else {  // exact2
                if (cfg.variant == Variant::non_systematic && L == 2) {
                    v = two_user_exact(code, net.eps[0], net.eps[1]);
                } else {
                    notes.push_back("exact2 skipped (needs non-systematic, L=2) at " +
                                    context());
                }
            }
        } catch (const std::exception& e) {
            notes.push_back(std::string("bound '") + method + "' failed at " + context() +
                            ": " + e.what());
            v = kNan;
        }
        row.bounds.emplace_back(method, v);
    }

    const Estimate est =
        simulate_multicast(code, net, cfg.trials, row_seed, SimOptions{1, false});
    row.sim_mean = est.mean;
    row.sim_halfwidth = est.half_width;
    return row;
}

}  // namespace

std::vector<ResultRow> run_sweep(const ExperimentConfig& config) {
    config.validate();
    std::vector<RowTask> tasks;
    for (int L : config.L_values) {
        for (int N = config.n_lo(); N <= config.n_hi(); ++N) {
            tasks.push_back(RowTask{L, N, tasks.size()});
        }
    }
    std::vector<ResultRow> rows(tasks.size());
    std::vector<std::vector<std::string>> notes(tasks.size());

    const int nt = config.threads == 0 ? omp_get_max_threads() : config.threads;
    if (nt == 1) {
        for (const RowTask& t : tasks) {
            const std::uint64_t row_seed = splitmix64(config.seed + t.index);
            rows[t.index] = evaluate_row(config, t.L, t.N, row_seed, notes[t.index]);
        }
    } else {
        // Rows are independent; buffer by index so output order never depends
        // on scheduling.
#pragma omp parallel for schedule(dynamic) num_threads(nt)
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            const RowTask& t = tasks[i];
            const std::uint64_t row_seed = splitmix64(config.seed + t.index);
            rows[t.index] = evaluate_row(config, t.L, t.N, row_seed, notes[t.index]);
        }
    }
    for (const auto& rn : notes) {
        for (const auto& n : rn) std::cerr << "note: " << n << "\n";
    }
    return rows;
}

std::vector<ResultRow> run_sweeps(const std::vector<ExperimentConfig>& configs) {
    std::vector<ResultRow> all;
    for (const auto& cfg : configs) {
        auto rows = run_sweep(cfg);
        all.insert(all.end(), rows.begin(), rows.end());
    }
    return all;
}

namespace {

std::vector<std::string> method_columns(const std::vector<ResultRow>& rows) {
    std::vector<std::string> cols;
    for (const auto& row : rows) {
        for (const auto& [name, value] : row.bounds) {
            if (std::find(cols.begin(), cols.end(), name) == cols.end()) {
                cols.push_back(name);
            }
        }
    }
    return cols;
}

}  // namespace

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
    const auto cols = method_columns(rows);
    out << "L,K,N,q,variant,eps_spec,trials,seed";
    for (const auto& c : cols) out << ',' << c;
    out << ",sim_mean,sim_halfwidth\n";
    for (const auto& r : rows) {
        out << r.L << ',' << r.K << ',' << r.N << ',' << r.q << ',' << variant_name(r.variant)
            << ',' << r.eps_spec << ',' << r.trials << ',' << r.seed;
        for (const auto& c : cols) out << ',' << fmt_double(r.bound(c));
        out << ',' << fmt_double(r.sim_mean) << ',' << fmt_double(r.sim_halfwidth) << '\n';
    }
}

void write_jsonl(const std::vector<ResultRow>& rows, std::ostream& out) {
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["L"] = r.L;
        j["K"] = r.K;
        j["N"] = r.N;
        j["q"] = r.q;
        j["variant"] = variant_name(r.variant);
        j["eps_spec"] = r.eps_spec;
        j["trials"] = r.trials;
        j["seed"] = r.seed;
        nlohmann::ordered_json b = nlohmann::ordered_json::object();
        for (const auto& [name, value] : r.bounds) {
            if (std::isnan(value)) {
                b[name] = nullptr;
            } else {
                b[name] = value;
            }
        }
        j["bounds"] = b;
        j["sim_mean"] = r.sim_mean;
        j["sim_halfwidth"] = r.sim_halfwidth;
        out << j.dump() << '\n';
    }
}

void write_results(const std::vector<ResultRow>& rows, const std::string& path_stem,
                   const std::string& format) {
    const auto ends_with = [](const std::string& s, const std::string& suf) {
        return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
    };
    const auto emit = [&](const std::string& ext, auto writer) {
        const std::string path = ends_with(path_stem, ext) ? path_stem : path_stem + ext;
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open " + path);
        writer(rows, out);
    };
    if (format == "csv") {
        emit(".csv", write_csv);
    } else if (format == "jsonl") {
        emit(".jsonl", write_jsonl);
    } else if (format == "both") {
        emit(".csv", write_csv);
        emit(".jsonl", write_jsonl);
    } else {
        throw std::invalid_argument("unknown format: " + format);
    }
}

namespace {

std::vector<ResultRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty results file");
    const auto header = split(line, ',');
    const auto col = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw std::runtime_error("missing column " + name);
        return std::size_t(it - header.begin());
    };
    const std::size_t c_sim = col("sim_mean");
    const std::size_t c_seed = col("seed");
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != header.size()) throw std::runtime_error("ragged results file");
        ResultRow r;
        r.L = std::stoi(f[col("L")]);
        r.K = std::stoi(f[col("K")]);
        r.N = std::stoi(f[col("N")]);
        r.q = std::stoll(f[col("q")]);
        r.variant = parse_variant(f[col("variant")]);
        r.eps_spec = f[col("eps_spec")];
        r.trials = std::stoll(f[col("trials")]);
        r.seed = std::stoull(f[col("seed")]);
        for (std::size_t c = c_seed + 1; c < c_sim; ++c) {
            r.bounds.emplace_back(header[c], std::strtod(f[c].c_str(), nullptr));
        }
        r.sim_mean = parse_double(f[c_sim]);
        r.sim_halfwidth = parse_double(f[col("sim_halfwidth")]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<ResultRow> read_jsonl(std::istream& in) {
    std::vector<ResultRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        ResultRow r;
        r.L = j.at("L").get<int>();
        r.K = j.at("K").get<int>();
        r.N = j.at("N").get<int>();
        r.q = j.at("q").get<std::int64_t>();
        r.variant = parse_variant(j.at("variant").get<std::string>());
        r.eps_spec = j.at("eps_spec").get<std::string>();
        r.trials = j.at("trials").get<std::int64_t>();
        r.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& [name, value] : j.at("bounds").items()) {
            r.bounds.emplace_back(name, value.is_null() ? kNan : value.get<double>());
        }
        r.sim_mean = j.at("sim_mean").get<double>();
        r.sim_halfwidth = j.at("sim_halfwidth").get<double>();
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace

std::vector<ResultRow> read_results(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    if (path.size() >= 6 && path.compare(path.size() - 6, 6, ".jsonl") == 0) {
        return read_jsonl(in);
    }
    return read_csv(in);
}

std::vector<MseEntry> mse_report(const std::vector<ResultRow>& rows) {
    struct Group {
        std::vector<const ResultRow*> rows;
    };
    std::vector<std::string> order;
    std::map<std::string, Group> groups;
    for (const auto& r : rows) {
        const std::string key = std::to_string(r.L) + '|' + std::to_string(r.K) + '|' +
                                std::to_string(r.q) + '|' + variant_name(r.variant) + '|' +
                                r.eps_spec;
        if (!groups.count(key)) order.push_back(key);
        groups[key].rows.push_back(&r);
    }

    std::vector<MseEntry> entries;
    for (const auto& key : order) {
        auto grouped = groups[key].rows;
        std::sort(grouped.begin(), grouped.end(),
                  [](const ResultRow* a, const ResultRow* b) { return a->N < b->N; });
        for (std::size_t i = 1; i < grouped.size(); ++i) {
            if (grouped[i]->N == grouped[i - 1]->N) {
                throw std::runtime_error("duplicate N in sweep group " + key);
            }
        }
        if (grouped.back()->N - grouped.front()->N + 1 != int(grouped.size())) {
            throw std::runtime_error("incomplete N sweep in group " + key +
                                     " (non-contiguous N values)");
        }
        std::vector<std::string> methods;
        for (const auto* r : grouped) {
            for (const auto& [name, value] : r->bounds) {
                if (std::find(methods.begin(), methods.end(), name) == methods.end()) {
                    methods.push_back(name);
                }
            }
        }
        for (const auto& m : methods) {
            std::vector<double> b, s;
            bool any_nan = false;
            for (const auto* r : grouped) {
                const double v = r->bound(m);
                if (std::isnan(v)) {
                    any_nan = true;
                    break;
                }
                b.push_back(v);
                s.push_back(r->sim_mean);
            }
            if (any_nan || b.empty()) continue;
            MseEntry e;
            const ResultRow* first = grouped.front();
            e.L = first->L;
            e.K = first->K;
            e.q = first->q;
            e.variant = first->variant;
            e.eps_spec = first->eps_spec;
            e.method = m;
            e.value = mse(b, s);
            e.points = int(b.size());
            entries.push_back(std::move(e));
        }
    }
    return entries;
}

std::string format_mse_table(const std::vector<MseEntry>& entries) {
    std::ostringstream out;
    out << "L K q variant eps method points mse\n";
    for (const auto& e : entries) {
        out << e.L << ' ' << e.K << ' ' << e.q << ' ' << variant_name(e.variant) << ' '
            << e.eps_spec << ' ' << e.method << ' ' << e.points << ' '
            << fmt_double(e.value, "%.6g") << '\n';
    }
    return out.str();
}

std::vector<ExperimentConfig> default_preset() {
    std::vector<ExperimentConfig> configs;
    const std::vector<int> all_L{2, 6, 10};
    const auto add = [&](std::vector<int> L, int K, std::int64_t q, Variant variant,
                         EpsSpec eps) {
        ExperimentConfig c;
        c.L_values = std::move(L);
        c.K = K;
        c.q = q;
        c.variant = variant;
        c.eps = std::move(eps);
        c.methods = variant == Variant::non_systematic
                        ? std::vector<std::string>{"product", "theorem1"}
                        : std::vector<std::string>{"product"};
        configs.push_back(std::move(c));
    };
    for (Variant variant : {Variant::non_systematic, Variant::systematic}) {
        for (double e : {0.01, 0.1}) {
            add(all_L, 5, 2, variant, EpsSpec::scalar(e));
            for (int K : {10, 15, 20}) add({6}, K, 2, variant, EpsSpec::scalar(e));
            add(all_L, 5, 256, variant, EpsSpec::scalar(e));
        }
        add(all_L, 5, 2, variant, EpsSpec::linspace(0.01, 0.1));
    }
    return configs;
}

std::vector<ExperimentConfig> parse_configs(const std::string& json_text) try {
    const auto j = nlohmann::json::parse(json_text);
    if (!j.contains("sweeps") || !j["sweeps"].is_array()) {
        throw std::invalid_argument("config must contain a 'sweeps' array");
    }
    std::vector<ExperimentConfig> configs;
    for (const auto& s : j["sweeps"]) {
        ExperimentConfig c;
        if (s.at("L").is_array()) {
            c.L_values = s.at("L").get<std::vector<int>>();
        } else {
            c.L_values = {s.at("L").get<int>()};
        }
        c.K = s.at("K").get<int>();
        c.q = s.value("q", std::int64_t(2));
        c.variant = parse_variant(s.value("variant", std::string("non-systematic")));
        const auto& eps = s.at("eps");
        if (eps.is_number()) {
            c.eps = EpsSpec::scalar(eps.get<double>());
        } else if (eps.is_array()) {
            c.eps = EpsSpec::list(eps.get<std::vector<double>>());
        } else {
            c.eps = EpsSpec::parse(eps.get<std::string>());
        }
        if (s.contains("N")) {
            const auto& n = s.at("N");
            if (n.is_array()) {
                if (n.size() != 2) throw std::invalid_argument("N must be [lo, hi]");
                c.N_lo = n[0].get<int>();
                c.N_hi = n[1].get<int>();
            } else {
                c.N_lo = c.N_hi = n.get<int>();
            }
        }
        c.trials = s.value("trials", std::int64_t(100000));
        c.seed = s.value("seed", std::uint64_t(1));
        if (s.contains("methods")) {
            c.methods = s.at("methods").get<std::vector<std::string>>();
        } else {
            c.methods = c.variant == Variant::non_systematic
                            ? std::vector<std::string>{"product", "theorem1"}
                            : std::vector<std::string>{"product"};
        }
        c.threads = s.value("threads", 0);
        c.validate();
        configs.push_back(std::move(c));
    }
    return configs;
} catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config error: ") + e.what());
}

std::vector<ExperimentConfig> load_configs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_configs(ss.str());
}

}  // namespace rlnc

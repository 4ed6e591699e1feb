#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "fadekit/channel.hpp"
#include "fadekit/error.hpp"
#include "fadekit/mc.hpp"
#include "fadekit/metrics.hpp"
#include "fadekit/system.hpp"
#include "fadekit/version.hpp"

namespace fadekit::scenario {

using Json = nlohmann::ordered_json;

/// The config file or an override is malformed or out of range. The message
/// starts with the source location and the field path.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A metric could not be computed at some sweep point. The message names the
/// operation, the sweep point and the hop parameters.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

/// A config tree together with where each field came from ("file:line" or
/// "--set ..."), keyed by paths like `hops[1].kappa`.
struct Document {
    Json tree = Json::object();
    std::string source;
    std::map<std::string, std::string> origins;

    std::string where(std::string_view path) const {
        std::string p(path);
        for (;;) {
            if (auto it = origins.find(p); it != origins.end()) return it->second;
            const auto cut = p.find_last_of(".[");
            if (cut == std::string::npos) return source;
            p.resize(cut);
        }
    }
};

inline std::string field_path(std::string_view parent, std::string_view key) {
    return parent.empty() ? std::string(key) : std::string(parent) + "." + std::string(key);
}

inline std::string field_path(std::string_view parent, std::size_t index) {
    return std::string(parent) + "[" + std::to_string(index) + "]";
}

[[noreturn]] inline void fail(const Document& doc, std::string_view path, std::string_view problem) {
    std::string msg = doc.where(path) + ": ";
    if (!path.empty()) msg += "field '" + std::string(path) + "': ";
    msg += problem;
    throw ConfigError(msg);
}

/// Shortest decimal form that reads back to the same double.
inline std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), r.ptr);
}

namespace detail {

inline void toml_to_json(const toml::node& node, const std::string& path, Document& doc, Json& out) {
    const auto& src = node.source();
    if (src.begin.line > 0) doc.origins[path] = doc.source + ":" + std::to_string(src.begin.line);
    if (const auto* t = node.as_table()) {
        out = Json::object();
        for (auto&& [k, v] : *t) {
            const std::string key(k.str());
            toml_to_json(v, field_path(path, key), doc, out[key]);
        }
    } else if (const auto* a = node.as_array()) {
        out = Json::array();
        for (std::size_t i = 0; i < a->size(); ++i) {
            out.push_back(Json());
            toml_to_json(*a->get(i), field_path(path, i), doc, out.back());
        }
    } else if (const auto* i = node.as_integer()) {
        out = i->get();
    } else if (const auto* f = node.as_floating_point()) {
        out = f->get();
    } else if (const auto* b = node.as_boolean()) {
        out = b->get();
    } else if (const auto* s = node.as_string()) {
        out = s->get();
    } else {
        fail(doc, path, "dates and times are not accepted");
    }
}

/// Reads an override value with TOML value syntax; anything that does not
/// parse is taken as a bare string, so `--set model=extreme` works.
inline Json parse_override_value(std::string_view text) {
    try {
        const toml::table t = toml::parse("v = " + std::string(text));
        Document scratch;
        Json out;
        toml_to_json(*t.get("v"), "v", scratch, out);
        return out;
    } catch (const toml::parse_error&) {
        return Json(std::string(text));
    }
}

struct PathStep {
    std::string key;
    std::optional<std::size_t> index;
};

inline std::vector<PathStep> parse_path(std::string_view path, const std::string& where) {
    std::vector<PathStep> steps;
    auto bad = [&where]() -> ConfigError { return ConfigError(where + ": malformed key path"); };
    std::size_t i = 0;
    while (i < path.size()) {
        std::size_t j = i;
        while (j < path.size() && path[j] != '.' && path[j] != '[') ++j;
        const std::string_view name = path.substr(i, j - i);
        if (!name.empty()) {
            if (std::all_of(name.begin(), name.end(), [](char c) { return c >= '0' && c <= '9'; })) {
                steps.push_back({"", std::stoul(std::string(name))});
            } else {
                steps.push_back({std::string(name), std::nullopt});
            }
        } else if (j < path.size() && path[j] == '.') {
            throw bad();
        }
        i = j;
        while (i < path.size() && path[i] == '[') {
            const auto close = path.find(']', i);
            if (close == std::string_view::npos || close == i + 1) throw bad();
            const std::string_view digits = path.substr(i + 1, close - i - 1);
            std::size_t idx = 0;
            const auto r = std::from_chars(digits.data(), digits.data() + digits.size(), idx);
            if (r.ec != std::errc() || r.ptr != digits.data() + digits.size()) throw bad();
            steps.push_back({"", idx});
            i = close + 1;
        }
        if (i < path.size()) {
            if (path[i] != '.') throw bad();
            ++i;
            if (i == path.size()) throw bad();
        }
    }
    if (steps.empty()) throw bad();
    return steps;
}

}  // namespace detail

inline Document parse_toml(std::string_view text, std::string source) {
    Document doc;
    doc.source = std::move(source);
    toml::table table;
    try {
        table = toml::parse(text, doc.source);
    } catch (const toml::parse_error& e) {
        throw ConfigError(doc.source + ":" + std::to_string(e.source().begin.line) + ": " +
                          std::string(e.description()));
    }
    detail::toml_to_json(table, "", doc, doc.tree);
    doc.origins.erase("");
    return doc;
}

inline Document parse_json(std::string_view text, std::string source) {
    Document doc;
    doc.source = std::move(source);
    try {
        doc.tree = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(doc.source + ": " + e.what());
    }
    if (!doc.tree.is_object()) throw ConfigError(doc.source + ": the top level must be an object");
    return doc;
}

/// Loads a config file. JSON is recognized by a `.json` extension or a
/// leading `{`; everything else is read as TOML.
inline Document load_document(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    const bool json = std::filesystem::path(path).extension() == ".json" ||
                      (first != std::string::npos && text[first] == '{');
    return json ? parse_json(text, path) : parse_toml(text, path);
}

/// Applies one `key=value` override. Keys are dotted paths; array elements
/// are addressed as `hops[1].mu` or `hops.1.mu`, and an index one past the
/// end appends.
inline void apply_override(Document& doc, std::string_view assignment) {
    const std::string where = "--set " + std::string(assignment);
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) throw ConfigError(where + ": expected key=value");
    const std::string_view key = assignment.substr(0, eq);
    const Json value = detail::parse_override_value(assignment.substr(eq + 1));
    const auto steps = detail::parse_path(key, where);

    Json* node = &doc.tree;
    std::string path;
    for (std::size_t s = 0; s < steps.size(); ++s) {
        const auto& step = steps[s];
        const bool last = s + 1 == steps.size();
        if (step.index) {
            if (node->is_null()) *node = Json::array();
            if (!node->is_array()) throw ConfigError(where + ": '" + path + "' is not an array");
            const std::size_t i = *step.index;
            if (i > node->size()) {
                throw ConfigError(where + ": index " + std::to_string(i) + " is past the end of '" + path + "'");
            }
            if (i == node->size()) node->push_back(last ? Json() : Json::object());
            node = &(*node)[i];
            path = field_path(path, i);
        } else {
            if (node->is_null()) *node = Json::object();
            if (!node->is_object()) throw ConfigError(where + ": '" + path + "' is not a table");
            node = &(*node)[step.key];
            path = field_path(path, step.key);
        }
    }
    *node = value;
    std::erase_if(doc.origins, [&path](const auto& kv) {
        const std::string& k = kv.first;
        return k == path || (k.starts_with(path) && (k[path.size()] == '.' || k[path.size()] == '['));
    });
    doc.origins[path] = where;
}

enum class Metric { af, op, ber, capacity };

inline const char* metric_name(Metric m) {
    switch (m) {
        case Metric::af: return "af";
        case Metric::op: return "op";
        case Metric::ber: return "ber";
        case Metric::capacity: return "capacity";
    }
    return "?";
}

struct HopConfig {
    std::string model = "akm";
    double alpha = 2.0;
    double kappa = 0.0;
    double mu = 0.0;
    double m = 0.0;
    double snr_offset_db = 0.0;
};

struct SweepConfig {
    double start_db = 0.0;
    double stop_db = 0.0;
    std::int64_t points = 1;

    double at(std::size_t i) const {
        if (points == 1) return start_db;
        if (static_cast<std::int64_t>(i) == points - 1) return stop_db;
        return start_db + (stop_db - start_db) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
};

struct McSection {
    bool enabled = false;
    std::uint64_t trials = 1000000;
    std::uint64_t seed = 1;
    std::uint64_t streams = 1;
};

struct AsymptoticSection {
    bool enabled = false;
    std::int64_t N = 10;
};

/// A fully resolved scenario. SNRs and thresholds are in dB here and are
/// converted to linear scale when the chain is built.
struct ScenarioConfig {
    std::string model = "akm";
    std::vector<HopConfig> hops;
    double gamma_th_db = -std::numeric_limits<double>::infinity();
    Metric metric = Metric::op;
    Modulation modulation = Modulation::make(ModulationKind::bpsk);
    std::string capacity_scheme = "ora";
    std::int64_t af_order = 2;
    double bandwidth = 1.0;
    std::optional<double> tifr_cutoff_db;
    bool ebn0_mode = false;
    SweepConfig sweep;
    McSection mc;
    AsymptoticSection asymptotic;
    std::string output = "fadekit_out";
};

namespace detail {

class Reader {
public:
    explicit Reader(const Document& doc) : doc_(doc) {}

    [[noreturn]] void fail(std::string_view path, std::string_view problem) const {
        scenario::fail(doc_, path, problem);
    }

    void only_keys(const Json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) const {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (std::find(allowed.begin(), allowed.end(), it.key()) != allowed.end()) continue;
            std::string list;
            for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
            fail(field_path(path, it.key()), "unknown key (allowed: " + list + ")");
        }
    }

    const Json& table(const Json& v, const std::string& path) const {
        if (!v.is_object()) fail(path, "expected a table");
        return v;
    }

    double number(const Json& v, const std::string& path) const {
        if (!v.is_number()) fail(path, "expected a number");
        const double x = v.get<double>();
        if (std::isnan(x)) fail(path, "must not be nan");
        return x;
    }

    double finite(const Json& v, const std::string& path) const {
        const double x = number(v, path);
        if (!std::isfinite(x)) fail(path, "must be finite");
        return x;
    }

    double positive(const Json& v, const std::string& path) const {
        const double x = finite(v, path);
        if (!(x > 0.0)) fail(path, "must be > 0");
        return x;
    }

    std::int64_t integer(const Json& v, const std::string& path, std::int64_t lo) const {
        if (v.is_number_unsigned()) {
            if (v.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
                fail(path, "integer is too large");
        } else if (!v.is_number_integer()) {
            fail(path, "expected an integer");
        }
        const std::int64_t x = v.get<std::int64_t>();
        if (x < lo) fail(path, "must be >= " + std::to_string(lo));
        return x;
    }

    std::uint64_t unsigned_integer(const Json& v, const std::string& path, std::uint64_t lo) const {
        if (v.is_number_unsigned()) {
            const std::uint64_t x = v.get<std::uint64_t>();
            if (x < lo) fail(path, "must be >= " + std::to_string(lo));
            return x;
        }
        return static_cast<std::uint64_t>(integer(v, path, static_cast<std::int64_t>(lo)));
    }

    bool boolean(const Json& v, const std::string& path) const {
        if (!v.is_boolean()) fail(path, "expected true or false");
        return v.get<bool>();
    }

    std::string string(const Json& v, const std::string& path) const {
        if (!v.is_string()) fail(path, "expected a string");
        return v.get<std::string>();
    }

    std::string choice(const Json& v, const std::string& path, std::initializer_list<std::string_view> options) const {
        const std::string s = string(v, path);
        if (std::find(options.begin(), options.end(), s) != options.end()) return s;
        std::string list;
        for (auto o : options) list += (list.empty() ? "" : ", ") + std::string(o);
        fail(path, "'" + s + "' is not one of: " + list);
    }

private:
    const Document& doc_;
};

inline const Json* find(const Json& obj, std::string_view key) {
    const auto it = obj.find(std::string(key));
    return it == obj.end() ? nullptr : &*it;
}

inline const std::array<ModulationKind, 8>& all_modulations() {
    static const std::array<ModulationKind, 8> kinds{
        ModulationKind::bfsk_coherent, ModulationKind::bpsk,  ModulationKind::qpsk,
        ModulationKind::qam4,          ModulationKind::mpam,  ModulationKind::bfsk_noncoherent,
        ModulationKind::dbpsk,         ModulationKind::mfsk};
    return kinds;
}

}  // namespace detail

/// Validates a config tree and resolves every default. The reserved
/// `fadekit` table written into meta files is ignored.
inline ScenarioConfig from_document(const Document& doc) {
    const detail::Reader rd(doc);
    const Json& root = rd.table(doc.tree, "");
    rd.only_keys(root,
                 "",
                 {"model", "hops", "gamma_th_db", "metric", "modulation", "modulation_order", "capacity_scheme",
                  "af_order", "bandwidth", "tifr_cutoff_db", "ebn0_mode", "sweep", "mc", "asymptotic", "output",
                  "fadekit"});
    using detail::find;
    ScenarioConfig cfg;

    if (const Json* v = find(root, "model")) cfg.model = rd.choice(*v, "model", {"akm", "extreme"});

    const Json* metric = find(root, "metric");
    if (metric == nullptr) rd.fail("metric", "missing (one of: af, op, ber, capacity)");
    const std::string m = rd.choice(*metric, "metric", {"af", "op", "ber", "capacity"});
    cfg.metric = m == "af" ? Metric::af : m == "op" ? Metric::op : m == "ber" ? Metric::ber : Metric::capacity;

    if (const Json* v = find(root, "gamma_th_db")) {
        if (v->is_string()) {
            if (v->get<std::string>() != "-inf") rd.fail("gamma_th_db", "expected a number or \"-inf\"");
        } else {
            cfg.gamma_th_db = rd.number(*v, "gamma_th_db");
            if (cfg.gamma_th_db == std::numeric_limits<double>::infinity()) rd.fail("gamma_th_db", "must be < inf");
        }
    }

    ModulationKind kind = ModulationKind::bpsk;
    if (const Json* v = find(root, "modulation")) {
        const std::string name = rd.choice(
            *v, "modulation", {"bfsk_coh", "bpsk", "qpsk", "qam4", "mpam", "bfsk_nc", "dbpsk", "mfsk"});
        for (ModulationKind k : detail::all_modulations())
            if (Modulation::make(k, 2).name() == name) kind = k;
    }
    const bool variable_order = kind == ModulationKind::mpam || kind == ModulationKind::mfsk;
    std::int64_t order = variable_order ? 2 : Modulation::make(kind).order;
    if (const Json* v = find(root, "modulation_order")) {
        const std::int64_t given = rd.integer(*v, "modulation_order", 2);
        if (!variable_order && given != order) {
            rd.fail("modulation_order",
                    Modulation::make(kind).name() + " has the fixed order " + std::to_string(order));
        }
        if (given > 1 << 20) rd.fail("modulation_order", "must be <= 1048576");
        order = given;
    }
    cfg.modulation = Modulation::make(kind, static_cast<int>(order));

    if (const Json* v = find(root, "capacity_scheme"))
        cfg.capacity_scheme = rd.choice(*v, "capacity_scheme", {"ora", "opra", "cifr", "tifr", "all"});
    if (const Json* v = find(root, "af_order")) {
        cfg.af_order = rd.integer(*v, "af_order", 2);
        if (cfg.af_order > 64) rd.fail("af_order", "must be <= 64");
    }
    if (const Json* v = find(root, "bandwidth")) cfg.bandwidth = rd.positive(*v, "bandwidth");
    if (const Json* v = find(root, "tifr_cutoff_db")) cfg.tifr_cutoff_db = rd.finite(*v, "tifr_cutoff_db");
    if (const Json* v = find(root, "ebn0_mode")) cfg.ebn0_mode = rd.boolean(*v, "ebn0_mode");
    if (const Json* v = find(root, "output")) {
        cfg.output = rd.string(*v, "output");
        if (cfg.output.empty()) rd.fail("output", "must not be empty");
    }

    const Json* sweep = find(root, "sweep");
    if (sweep == nullptr) rd.fail("sweep", "missing table with start_db, stop_db, points");
    rd.table(*sweep, "sweep");
    rd.only_keys(*sweep, "sweep", {"start_db", "stop_db", "points"});
    for (const char* key : {"start_db", "stop_db", "points"})
        if (find(*sweep, key) == nullptr) rd.fail(field_path("sweep", key), "missing");
    cfg.sweep.start_db = rd.finite(*find(*sweep, "start_db"), "sweep.start_db");
    cfg.sweep.stop_db = rd.finite(*find(*sweep, "stop_db"), "sweep.stop_db");
    cfg.sweep.points = rd.integer(*find(*sweep, "points"), "sweep.points", 1);
    if (cfg.sweep.points > 1000000) rd.fail("sweep.points", "must be <= 1000000");
    if (cfg.sweep.stop_db < cfg.sweep.start_db) rd.fail("sweep.stop_db", "must be >= sweep.start_db");

    if (const Json* mc = find(root, "mc")) {
        rd.table(*mc, "mc");
        rd.only_keys(*mc, "mc", {"enabled", "trials", "seed", "streams"});
        if (const Json* v = find(*mc, "enabled")) cfg.mc.enabled = rd.boolean(*v, "mc.enabled");
        if (const Json* v = find(*mc, "trials")) cfg.mc.trials = rd.unsigned_integer(*v, "mc.trials", 2);
        if (const Json* v = find(*mc, "seed")) cfg.mc.seed = rd.unsigned_integer(*v, "mc.seed", 0);
        if (const Json* v = find(*mc, "streams")) cfg.mc.streams = rd.unsigned_integer(*v, "mc.streams", 1);
        if (cfg.mc.streams > cfg.mc.trials) rd.fail("mc.streams", "must be <= mc.trials");
    }
    if (cfg.mc.enabled && cfg.metric == Metric::capacity && cfg.capacity_scheme != "ora")
        rd.fail("mc.enabled", "Monte Carlo is available for capacity_scheme = \"ora\" only");

    if (const Json* as = find(root, "asymptotic")) {
        rd.table(*as, "asymptotic");
        rd.only_keys(*as, "asymptotic", {"enabled", "N"});
        if (const Json* v = find(*as, "enabled")) cfg.asymptotic.enabled = rd.boolean(*v, "asymptotic.enabled");
        if (const Json* v = find(*as, "N")) {
            cfg.asymptotic.N = rd.integer(*v, "asymptotic.N", 1);
            if (cfg.asymptotic.N > 200) rd.fail("asymptotic.N", "must be <= 200");
        }
    }
    if (cfg.asymptotic.enabled && cfg.metric != Metric::ber)
        rd.fail("asymptotic.enabled", "the asymptotic column is available for metric = \"ber\" only");

    const Json* hops = find(root, "hops");
    if (hops == nullptr) rd.fail("hops", "missing (at least one [[hops]] table)");
    if (!hops->is_array() || hops->empty()) rd.fail("hops", "expected a non-empty array of tables");
    for (std::size_t i = 0; i < hops->size(); ++i) {
        const std::string path = field_path("hops", i);
        const Json& h = rd.table((*hops)[i], path);
        rd.only_keys(h, path, {"model", "alpha", "kappa", "mu", "m", "snr_offset_db"});
        HopConfig hop;
        hop.model = cfg.model;
        if (const Json* v = find(h, "model")) hop.model = rd.choice(*v, field_path(path, "model"), {"akm", "extreme"});
        const Json* a = find(h, "alpha");
        if (a == nullptr) rd.fail(field_path(path, "alpha"), "missing");
        hop.alpha = rd.positive(*a, field_path(path, "alpha"));
        const bool akm = hop.model == "akm";
        const std::vector<std::string_view> required = akm ? std::vector<std::string_view>{"kappa", "mu"}
                                                           : std::vector<std::string_view>{"m"};
        const std::vector<std::string_view> forbidden = akm ? std::vector<std::string_view>{"m"}
                                                            : std::vector<std::string_view>{"kappa", "mu"};
        for (std::string_view key : required)
            if (find(h, key) == nullptr) rd.fail(field_path(path, key), "missing (required by model " + hop.model + ")");
        for (std::string_view key : forbidden)
            if (find(h, key) != nullptr) rd.fail(field_path(path, key), "not a parameter of model " + hop.model);
        if (akm) {
            hop.kappa = rd.positive(*find(h, "kappa"), field_path(path, "kappa"));
            hop.mu = rd.positive(*find(h, "mu"), field_path(path, "mu"));
        } else {
            hop.m = rd.positive(*find(h, "m"), field_path(path, "m"));
        }
        if (const Json* v = find(h, "snr_offset_db")) hop.snr_offset_db = rd.finite(*v, field_path(path, "snr_offset_db"));
        cfg.hops.push_back(hop);
    }
    return cfg;
}

/// The resolved config as written to the meta file. Feeding it back through
/// from_document gives an identical ScenarioConfig.
inline Json to_json(const ScenarioConfig& cfg) {
    Json j = Json::object();
    j["model"] = cfg.model;
    if (std::isinf(cfg.gamma_th_db)) {
        j["gamma_th_db"] = "-inf";
    } else {
        j["gamma_th_db"] = cfg.gamma_th_db;
    }
    j["metric"] = metric_name(cfg.metric);
    j["modulation"] = cfg.modulation.name();
    j["modulation_order"] = cfg.modulation.order;
    j["capacity_scheme"] = cfg.capacity_scheme;
    j["af_order"] = cfg.af_order;
    j["bandwidth"] = cfg.bandwidth;
    if (cfg.tifr_cutoff_db) j["tifr_cutoff_db"] = *cfg.tifr_cutoff_db;
    j["ebn0_mode"] = cfg.ebn0_mode;
    j["output"] = cfg.output;
    j["sweep"] = {{"start_db", cfg.sweep.start_db}, {"stop_db", cfg.sweep.stop_db}, {"points", cfg.sweep.points}};
    j["mc"] = {{"enabled", cfg.mc.enabled},
               {"trials", cfg.mc.trials},
               {"seed", cfg.mc.seed},
               {"streams", cfg.mc.streams}};
    j["asymptotic"] = {{"enabled", cfg.asymptotic.enabled}, {"N", cfg.asymptotic.N}};
    Json hops = Json::array();
    for (const HopConfig& h : cfg.hops) {
        Json o = Json::object();
        o["model"] = h.model;
        o["alpha"] = h.alpha;
        if (h.model == "akm") {
            o["kappa"] = h.kappa;
            o["mu"] = h.mu;
        } else {
            o["m"] = h.m;
        }
        o["snr_offset_db"] = h.snr_offset_db;
        hops.push_back(std::move(o));
    }
    j["hops"] = std::move(hops);
    return j;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline std::vector<std::string> columns(const ScenarioConfig& cfg) {
    std::vector<std::string> cols{"snr_db"};
    if (cfg.metric == Metric::capacity && cfg.capacity_scheme == "all") {
        cols.insert(cols.end(), {"opra", "ora", "tifr", "cifr"});
    } else {
        cols.push_back("value");
    }
    if (cfg.mc.enabled) cols.insert(cols.end(), {"mc_value", "mc_stderr"});
    if (cfg.asymptotic.enabled) cols.push_back("asymptotic_value");
    return cols;
}

/// Hop laws at one sweep point. The sweep value plus the hop offset is the
/// mean SNR in Eb/N0 mode and the scale parameter otherwise.
inline HopChain build_chain(const ScenarioConfig& cfg, double snr_db) {
    std::vector<FadingLaw> laws;
    laws.reserve(cfg.hops.size());
    for (const HopConfig& h : cfg.hops) {
        const double level = db_to_linear(snr_db + h.snr_offset_db);
        if (h.model == "akm") {
            laws.push_back(cfg.ebn0_mode ? akm_from_ebn0(h.alpha, h.kappa, h.mu, level)
                                         : AlphaKappaMu::from_scale(h.alpha, h.kappa, h.mu, level));
        } else {
            laws.push_back(cfg.ebn0_mode ? extreme_from_ebn0(h.alpha, h.m, level)
                                         : AlphaKappaMuExtreme::from_scale(h.alpha, h.m, level));
        }
    }
    return HopChain(std::move(laws), db_to_linear(cfg.gamma_th_db));
}

inline std::string describe_point(const ScenarioConfig& cfg, double snr_db) {
    std::string s = "snr_db=" + format_number(snr_db) + ", gamma_th_db=" + format_number(cfg.gamma_th_db) +
                    (cfg.ebn0_mode ? ", ebn0_mode" : "") + ", hops=[";
    for (std::size_t i = 0; i < cfg.hops.size(); ++i) {
        const HopConfig& h = cfg.hops[i];
        if (i > 0) s += ", ";
        s += h.model + "(alpha=" + format_number(h.alpha);
        if (h.model == "akm") {
            s += ", kappa=" + format_number(h.kappa) + ", mu=" + format_number(h.mu);
        } else {
            s += ", m=" + format_number(h.m);
        }
        s += ", level_db=" + format_number(snr_db + h.snr_offset_db) + ")";
    }
    return s + "]";
}

/// All values of one CSV row after snr_db, in column order.
inline std::vector<double> evaluate_point(const ScenarioConfig& cfg, std::size_t index) {
    const double snr_db = cfg.sweep.at(index);
    auto attempt = [&](std::string_view op, auto&& f) -> double {
        double v;
        try {
            v = f();
        } catch (const Error& e) {
            throw NumericalFailure(std::string(op) + " failed at " + describe_point(cfg, snr_db) + ": " + e.what());
        }
        if (!std::isfinite(v)) {
            throw NumericalFailure(std::string(op) + " gave " + format_number(v) + " at " +
                                   describe_point(cfg, snr_db));
        }
        return v;
    };

    std::optional<HopChain> built;
    attempt("building the hop chain", [&] {
        built.emplace(build_chain(cfg, snr_db));
        return 0.0;
    });
    const HopChain& chain = *built;
    const double gamma_th = chain.gamma_th();
    const double bw = cfg.bandwidth;
    const Modulation& mod = cfg.modulation;

    std::vector<double> row;
    switch (cfg.metric) {
        case Metric::af:
            row.push_back(attempt("amount_of_fading(order=" + std::to_string(cfg.af_order) + ")",
                                  [&] { return amount_of_fading(chain, static_cast<int>(cfg.af_order)); }));
            break;
        case Metric::op:
            row.push_back(attempt("outage_probability", [&] { return outage_probability(chain, gamma_th); }));
            break;
        case Metric::ber:
            row.push_back(attempt("ber(" + mod.name() + ")", [&] { return ber(chain, mod); }));
            break;
        case Metric::capacity: {
            auto opra = [&] { return attempt("capacity_opra", [&] { return capacity_opra(chain, bw).value; }); };
            auto ora = [&] { return attempt("capacity_ora", [&] { return capacity_ora(chain, bw).value; }); };
            auto cifr = [&] { return attempt("capacity_cifr", [&] { return capacity_cifr(chain, bw).value; }); };
            auto tifr = [&] {
                return attempt("capacity_tifr", [&] {
                    return cfg.tifr_cutoff_db ? capacity_tifr(chain, bw, db_to_linear(*cfg.tifr_cutoff_db)).value
                                              : capacity_tifr(chain, bw).value;
                });
            };
            const std::string& s = cfg.capacity_scheme;
            if (s == "all") {
                row.push_back(opra());
                row.push_back(ora());
                row.push_back(tifr());
                row.push_back(cifr());
            } else {
                row.push_back(s == "ora" ? ora() : s == "opra" ? opra() : s == "tifr" ? tifr() : cifr());
            }
            break;
        }
    }

    if (cfg.mc.enabled) {
        mc::MetricSpec spec;
        spec.threshold = gamma_th;
        spec.modulation = mod;
        spec.bandwidth = bw;
        spec.af_order = static_cast<int>(cfg.af_order);
        spec.hops = cfg.hops.size();
        spec.kind = cfg.metric == Metric::af    ? mc::MetricKind::amount_of_fading
                    : cfg.metric == Metric::op  ? mc::MetricKind::outage
                    : cfg.metric == Metric::ber ? mc::MetricKind::ber
                                                : mc::MetricKind::capacity_ora;
        const mc::McConfig mcc{cfg.mc.trials, mc::derive_seed(cfg.mc.seed, index), cfg.mc.streams};
        mc::Estimate est;
        attempt("monte_carlo(" + std::string(metric_name(cfg.metric)) + ")", [&] {
            est = mc::estimate_metric(chain, mcc, spec);
            return est.mean;
        });
        row.push_back(est.mean);
        row.push_back(est.std_error);
    }
    if (cfg.asymptotic.enabled) {
        row.push_back(attempt("ber_asymptotic(N=" + std::to_string(cfg.asymptotic.N) + ")",
                              [&] { return ber_asymptotic(chain, mod, static_cast<int>(cfg.asymptotic.N)); }));
    }
    return row;
}

struct RunOutput {
    std::string csv;
    std::string meta;
};

/// Worker count from FADEKIT_THREADS, or the hardware concurrency when it
/// is unset.
inline unsigned threads_from_env() {
    const char* env = std::getenv("FADEKIT_THREADS");
    if (env == nullptr || *env == '\0') return std::max(1u, std::thread::hardware_concurrency());
    unsigned n = 0;
    const std::string_view s(env);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), n);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || n == 0)
        throw ConfigError("FADEKIT_THREADS: expected a positive integer, got '" + std::string(s) + "'");
    return n;
}

/// Evaluates every sweep point on up to `threads` workers and renders the
/// CSV and meta JSON. Rows come out in sweep order whatever the thread
/// count; if several points fail, the first one in sweep order is reported.
inline RunOutput run(const ScenarioConfig& cfg, unsigned threads) {
    const auto n = static_cast<std::size_t>(cfg.sweep.points);
    std::vector<std::vector<double>> rows(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                rows[i] = evaluate_point(cfg, i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned workers = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, n));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    RunOutput out;
    const auto cols = columns(cfg);
    for (std::size_t c = 0; c < cols.size(); ++c) out.csv += (c ? "," : "") + cols[c];
    out.csv += '\n';
    for (std::size_t i = 0; i < n; ++i) {
        out.csv += format_number(cfg.sweep.at(i));
        for (double v : rows[i]) out.csv += "," + format_number(v);
        out.csv += '\n';
    }

    Json meta = to_json(cfg);
    meta["fadekit"] = {{"version", version}, {"seed", cfg.mc.seed}};
    out.meta = meta.dump(2) + "\n";
    return out;
}

/// Writes `<output>.csv` and `<output>.meta.json`, creating the parent
/// directory if needed.
inline void write_outputs(const ScenarioConfig& cfg, const RunOutput& out) {
    const std::filesystem::path base(cfg.output);
    if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
    auto write = [](const std::string& path, const std::string& text) {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f << text;
        f.close();
        if (!f) throw std::runtime_error("cannot write " + path);
    };
    write(cfg.output + ".csv", out.csv);
    write(cfg.output + ".meta.json", out.meta);
}

}  // namespace fadekit::scenario

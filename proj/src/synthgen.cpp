#include "mobnet/synthgen.hpp"

#include "mobnet/csv.hpp"
#include "mobnet/error.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <span>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace mobnet {

namespace {

// Sampling is done by hand on top of mt19937_64 so corpora are identical across
// standard library implementations (the std distributions are not specified exactly).
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal() {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Index drawn proportionally to `weights`, skipping entries flagged in `excluded`.
    std::size_t weighted(std::span<const double> weights, std::span<const char> excluded) {
        double total = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i)
            if (!excluded[i])
                total += weights[i];
        const double target = uniform() * total;
        double acc = 0.0;
        std::size_t last = weights.size();
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (excluded[i])
                continue;
            last = i;
            acc += weights[i];
            if (target < acc)
                return i;
        }
        return last;
    }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::string padded(std::string_view prefix, std::size_t value, std::size_t width) {
    std::string digits = std::to_string(value);
    if (digits.size() < width)
        digits.insert(0, width - digits.size(), '0');
    return std::string(prefix) + digits;
}

constexpr MotifTemplate kTemplates[] = {MotifTemplate::single_trip, MotifTemplate::return_pair,
                                        MotifTemplate::chain_3, MotifTemplate::chain_4,
                                        MotifTemplate::star_3};

} // namespace

MotifTemplate parse_template(std::string_view name) {
    for (auto t : kTemplates)
        if (to_string(t) == name)
            return t;
    throw ConfigError("unknown motif template '" + std::string(name) + "'");
}

std::string_view to_string(MotifTemplate t) {
    switch (t) {
    case MotifTemplate::single_trip: return "single-trip";
    case MotifTemplate::return_pair: return "return-pair";
    case MotifTemplate::chain_3: return "chain-3";
    case MotifTemplate::chain_4: return "chain-4";
    case MotifTemplate::star_3: return "star-3";
    }
    return "unknown";
}

std::size_t template_node_count(MotifTemplate t) {
    switch (t) {
    case MotifTemplate::single_trip:
    case MotifTemplate::return_pair: return 2;
    case MotifTemplate::chain_3:
    case MotifTemplate::star_3: return 3;
    case MotifTemplate::chain_4: return 4;
    }
    return 0;
}

std::vector<std::pair<std::size_t, std::size_t>> template_trips(MotifTemplate t) {
    switch (t) {
    case MotifTemplate::single_trip: return {{0, 1}};
    case MotifTemplate::return_pair: return {{0, 1}, {1, 0}};
    case MotifTemplate::chain_3: return {{0, 1}, {1, 2}, {2, 0}};
    case MotifTemplate::chain_4: return {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    case MotifTemplate::star_3: return {{0, 1}, {1, 0}, {0, 2}, {2, 0}};
    }
    return {};
}

void SynthConfig::validate() const {
    if (station_count == 0 || passenger_count == 0 || days == 0)
        throw ConfigError("synth: stations, passengers and days must be positive");
    if (importance.size() != station_count || home_weight.size() != station_count)
        throw ConfigError("synth: importance and home weights need one entry per station");
    auto positive = [](const std::vector<double> &v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0 && std::isfinite(x); });
    };
    if (!positive(importance) || !positive(home_weight))
        throw ConfigError("synth: importance and home weights must be positive");
    if (template_mix.empty())
        throw ConfigError("synth: template mix is empty");
    double total = 0.0;
    std::size_t largest = 0;
    for (const auto &[t, p] : template_mix) {
        if (!(p >= 0.0))
            throw ConfigError("synth: template probabilities must be non-negative");
        total += p;
        if (p > 0.0)
            largest = std::max(largest, template_node_count(t));
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw ConfigError("synth: template probabilities must sum to 1");
    if (station_count < largest)
        throw ConfigError("synth: need at least " + std::to_string(largest) +
                          " stations for the configured templates");
    if (!start_date.ok())
        throw ConfigError("synth: invalid start date");
}

std::vector<double> lognormal_importance(std::size_t n, double sigma, std::uint64_t seed) {
    Sampler s(splitmix64(seed ^ 0x1A2B3C4D5E6F7788ull));
    std::vector<double> out(n);
    for (auto &v : out)
        v = std::exp(sigma * s.normal());
    return out;
}

SynthCorpus generate(const SynthConfig &cfg) {
    cfg.validate();
    SynthCorpus corpus;
    const std::size_t id_width = std::to_string(cfg.station_count - 1).size();
    for (std::size_t i = 0; i < cfg.station_count; ++i)
        corpus.stations.add({padded("S", i, id_width), padded("Station ", i, id_width),
                             cfg.importance[i]});

    std::vector<MotifTemplate> templates;
    std::vector<double> template_p;
    for (const auto &[t, p] : cfg.template_mix) {
        templates.push_back(t);
        template_p.push_back(p);
    }
    const std::vector<char> none_excluded_templates(templates.size(), 0);

    const std::size_t card_width = std::to_string(cfg.passenger_count - 1).size();
    const auto first_day = std::chrono::local_days{cfg.start_date};
    std::vector<char> used(cfg.station_count, 0);
    std::vector<std::size_t> slots;

    for (std::size_t p = 0; p < cfg.passenger_count; ++p) {
        Sampler s(splitmix64(cfg.seed ^ splitmix64(p + 1)));
        const std::string card = padded("c", p, card_width);
        for (std::size_t d = 0; d < cfg.days; ++d) {
            std::fill(used.begin(), used.end(), 0);
            const std::size_t home = s.weighted(cfg.home_weight, used);
            used[home] = 1;
            const auto tmpl = templates[s.weighted(template_p, none_excluded_templates)];
            slots.assign(1, home);
            for (std::size_t k = 1; k < template_node_count(tmpl); ++k) {
                const std::size_t dest = s.weighted(cfg.importance, used);
                used[dest] = 1;
                slots.push_back(dest);
            }
            const auto trips = template_trips(tmpl);
            // evenly spaced departures between 07:00 and 21:00
            const auto spacing = std::chrono::seconds{14 * 3600 / static_cast<long>(trips.size())};
            const auto day_start = first_day + std::chrono::days{static_cast<long>(d)} +
                                   std::chrono::hours{7};
            for (std::size_t k = 0; k < trips.size(); ++k) {
                corpus.records.push_back({card,
                                          day_start + spacing * static_cast<long>(k),
                                          station(static_cast<std::uint32_t>(slots[trips[k].first])),
                                          station(static_cast<std::uint32_t>(slots[trips[k].second])),
                                          0});
            }
        }
    }
    // card ids are zero-padded, so generation order is already (card_id, time) order
    for (std::size_t i = 0; i < corpus.records.size(); ++i)
        corpus.records[i].line_number = i + 2;
    return corpus;
}

SynthConfig synth_config_from(const std::map<std::string, std::string> &settings) {
    static const std::set<std::string> known = {"stations", "passengers", "days", "seed",
                                                "start", "importance", "sigma", "home", "mix"};
    for (const auto &[k, v] : settings)
        if (!known.contains(k))
            throw ConfigError("synth: unknown setting '" + k + "'");

    auto get = [&](const std::string &key, std::string fallback) {
        auto it = settings.find(key);
        return it == settings.end() ? fallback : it->second;
    };
    auto get_uint = [&](const std::string &key, std::uint64_t fallback) -> std::uint64_t {
        auto it = settings.find(key);
        if (it == settings.end())
            return fallback;
        std::uint64_t v = 0;
        const auto &text = it->second;
        auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || end != text.data() + text.size())
            throw ConfigError("synth: '" + key + "' must be a non-negative integer");
        return v;
    };

    SynthConfig cfg;
    cfg.station_count = get_uint("stations", cfg.station_count);
    cfg.passenger_count = get_uint("passengers", cfg.passenger_count);
    cfg.days = get_uint("days", cfg.days);
    cfg.seed = get_uint("seed", cfg.seed);

    const std::string start = get("start", "2016-09-05");
    auto start_time = parse_iso_timestamp(start + "T00:00:00");
    if (!start_time)
        throw ConfigError("synth: start must be YYYY-MM-DD");
    cfg.start_date = std::chrono::year_month_day{std::chrono::floor<std::chrono::days>(*start_time)};

    const auto sigma = csv::parse_double(get("sigma", "1"));
    if (!sigma || *sigma < 0.0)
        throw ConfigError("synth: sigma must be a non-negative number");
    const std::string importance = get("importance", "lognormal");
    if (importance == "lognormal")
        cfg.importance = lognormal_importance(cfg.station_count, *sigma, cfg.seed);
    else if (importance == "uniform")
        cfg.importance.assign(cfg.station_count, 1.0);
    else
        throw ConfigError("synth: importance must be lognormal or uniform");

    const std::string home = get("home", "anti");
    if (home == "uniform")
        cfg.home_weight.assign(cfg.station_count, 1.0);
    else if (home == "anti")
        std::transform(cfg.importance.begin(), cfg.importance.end(),
                       std::back_inserter(cfg.home_weight), [](double v) { return 1.0 / v; });
    else if (home == "same")
        cfg.home_weight = cfg.importance;
    else
        throw ConfigError("synth: home must be uniform, anti or same");

    const std::string mix =
        get("mix", "return-pair:0.5,chain-3:0.15,star-3:0.1,chain-4:0.05,single-trip:0.2");
    for (const auto &entry : csv::split(mix)) {
        const auto colon = entry.find(':');
        if (colon == std::string::npos)
            throw ConfigError("synth: mix entries look like 'return-pair:0.5'");
        const auto p = csv::parse_double(std::string_view(entry).substr(colon + 1));
        if (!p)
            throw ConfigError("synth: bad probability in mix entry '" + entry + "'");
        cfg.template_mix[parse_template(csv::trim(std::string_view(entry).substr(0, colon)))] += *p;
    }
    return cfg;
}

} // namespace mobnet

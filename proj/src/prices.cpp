#include "scamhunt/chainlens.hpp"
#include "scamhunt/errors.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace scamhunt::chainlens {

namespace {

std::vector<std::string> split_csv_row(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string price_key(Chain chain, std::chrono::sys_days day) {
    return std::string(chain_name(chain)) + " " + format_date(day);
}

}  // namespace

PriceSeries PriceSeries::parse_csv(std::string_view text) {
    PriceSeries series;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header) {
            if (line != "chain,date,low_usd,high_usd") {
                throw ParseError(lineno, "price CSV header must be chain,date,low_usd,high_usd");
            }
            header = true;
            continue;
        }
        const auto cells = split_csv_row(line);
        if (cells.size() != 4) throw ParseError(lineno, "expected 4 columns, got " + std::to_string(cells.size()));
        const auto chain = parse_chain(cells[0]);
        if (!chain) throw ParseError(lineno, "unknown chain '" + cells[0] + "'");
        const auto day = parse_date(cells[1]);
        if (!day) throw ParseError(lineno, "bad date '" + cells[1] + "'");
        const auto low = Decimal::parse(cells[2]);
        const auto high = Decimal::parse(cells[3]);
        if (!low || !high) throw ParseError(lineno, "prices must be plain decimals");
        if (low->sign() <= 0 || *low > *high) {
            throw SchemaError("low_usd", "line " + std::to_string(lineno) + ": need 0 < low_usd <= high_usd");
        }
        if (series.find(*chain, *day)) throw ParseError(lineno, "duplicate price for " + price_key(*chain, *day));
        series.add(*chain, *day, {*low, *high});
    }
    if (!header) throw ParseError(0, "price CSV is empty");
    return series;
}

PriceSeries PriceSeries::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read price series " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

void PriceSeries::add(Chain chain, std::chrono::sys_days day, PriceBand band) {
    if (band.low.sign() <= 0 || band.low > band.high) {
        throw PreconditionError("price band for " + price_key(chain, day) + " needs 0 < low <= high");
    }
    bands_[{chain, day}] = std::move(band);
}

const PriceBand* PriceSeries::find(Chain chain, std::chrono::sys_days day) const {
    auto it = bands_.find({chain, day});
    return it == bands_.end() ? nullptr : &it->second;
}

std::optional<std::pair<std::chrono::sys_days, PriceBand>> PriceSeries::nearest(Chain chain, std::chrono::sys_days day,
                                                                                int window_days) const {
    for (int d = 0; d <= window_days; ++d) {
        // earlier day first so equidistant candidates resolve backwards
        for (int sign : {-1, 1}) {
            const auto probe = day + std::chrono::days(sign * d);
            if (const auto* band = find(chain, probe)) return std::pair{probe, *band};
            if (d == 0) break;
        }
    }
    return std::nullopt;
}

UsdRange usd_range(const Transfer& transfer, const PriceSeries& prices, const PriceOptions& options) {
    if (transfer.amount.sign() <= 0) {
        throw PreconditionError("cannot value transfer " + transfer.tx_hash + " with amount " +
                                transfer.amount.to_string());
    }
    if (options.nearest_day_window < 0 || options.nearest_day_window > kMaxNearestDayWindow) {
        throw PreconditionError("nearest-day window must be between 0 and " + std::to_string(kMaxNearestDayWindow));
    }
    const auto day = std::chrono::floor<std::chrono::days>(transfer.timestamp);
    const auto hit = prices.nearest(transfer.chain, day, options.nearest_day_window);
    if (!hit) throw MissingPriceError({price_key(transfer.chain, day)});
    UsdRange out;
    out.min_usd = transfer.amount * hit->second.low;
    out.max_usd = transfer.amount * hit->second.high;
    out.price_date = format_date(hit->first);
    out.substituted = hit->first != day;
    return out;
}

std::vector<UsdRange> usd_ranges(const std::vector<Transfer>& transfers, const PriceSeries& prices,
                                 const PriceOptions& options) {
    std::vector<UsdRange> out;
    std::set<std::string> missing;
    for (const auto& t : transfers) {
        try {
            out.push_back(usd_range(t, prices, options));
        } catch (const MissingPriceError& e) {
            missing.insert(e.dates().begin(), e.dates().end());
        }
    }
    if (!missing.empty()) throw MissingPriceError({missing.begin(), missing.end()});
    return out;
}

}  // namespace scamhunt::chainlens

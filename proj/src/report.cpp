#include "lzc/report.hpp"

#include <json.hpp>

#include <sstream>

namespace lzc {

namespace {

nlohmann::json rat_json(const Rat& r) {
    return {{"num", numerator(r).str()}, {"den", denominator(r).str()}};
}

} // namespace

std::string Report::to_text() const {
    std::ostringstream out;
    if (status == "ok" || has_typing) {
        if (has_typing)
            out << "⊢" << rat_str(upper) << "/" << rat_str(lower) << " " << main << " : "
                << typing << "\n";
    }
    if (has_counts) {
        out << "measured " << main << ":\n";
        out << "  var    " << counts.var << "\n";
        out << "  app    " << counts.app << "\n";
        out << "  cons   " << counts.cons << "\n";
        out << "  let    " << counts.let_ << "\n";
        out << "  letrec " << counts.letrec << "\n";
        out << "  match  " << counts.match << "\n";
        out << "  prim   " << counts.prim << "\n";
        out << "  total  " << rat_str(counts_total) << "\n";
    }
    if (!table.empty()) {
        out << "demand          bound      measured   ok\n";
        for (const auto& row : table) {
            std::string d = row.demand;
            d.resize(16, ' ');
            std::string b = rat_str(row.bound);
            b.resize(std::max<size_t>(b.size(), 10), ' ');
            std::string me = rat_str(row.measured);
            me.resize(std::max<size_t>(me.size(), 10), ' ');
            out << d << b << " " << me << " " << (row.ok ? "yes" : "NO") << "\n";
        }
    }
    if (!failure_kind.empty()) {
        out << "error (" << failure_kind << "): " << failure_message << "\n";
        if (!failure_trace.empty()) out << failure_trace;
    }
    if (status != "ok") out << "status: " << status << "\n";
    return out.str();
}

std::string Report::to_json() const {
    nlohmann::json j;
    j["schema"] = 1;
    j["mode"] = mode;
    j["file"] = file;
    j["main"] = main;
    j["status"] = status;
    if (has_typing) {
        j["typing"] = {{"upper", rat_json(upper)},
                       {"lower", rat_json(lower)},
                       {"type", typing}};
    }
    if (has_counts) {
        j["counts"] = {{"var", counts.var},   {"app", counts.app},
                       {"cons", counts.cons}, {"let", counts.let_},
                       {"letrec", counts.letrec}, {"match", counts.match},
                       {"prim", counts.prim}, {"total", rat_json(counts_total)}};
    }
    if (!table.empty()) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : table)
            rows.push_back({{"demand", row.demand},
                            {"bound", rat_json(row.bound)},
                            {"measured", rat_json(row.measured)},
                            {"ok", row.ok}});
        j["table"] = rows;
    }
    if (!failure_kind.empty()) {
        j["failure"] = {{"kind", failure_kind},
                        {"message", failure_message},
                        {"trace", failure_trace}};
    }
    return j.dump(2) + "\n";
}

} // namespace lzc

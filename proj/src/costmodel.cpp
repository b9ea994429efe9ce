#include "lzc/costmodel.hpp"

#include <sstream>
#include <stdexcept>

namespace lzc {

CostModel cost_preset(const std::string& name) {
    CostModel cm;
    if (name == "zero") return cm;
    if (name == "alloc") {
        cm.cons = 1;
        cm.let_ = 1;
        cm.letrec = 1;
        return cm;
    }
    if (name == "steps") {
        cm.var = cm.app = cm.cons = cm.let_ = cm.letrec = cm.match = cm.prim = 1;
        return cm;
    }
    throw std::invalid_argument("unknown cost preset '" + name + "'");
}

std::optional<CostModel> parse_cost_model(const std::string& spec) {
    if (spec == "alloc" || spec == "steps" || spec == "zero") return cost_preset(spec);
    CostModel cm; // explicit lists start from all-zero
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) return std::nullopt;
        std::string key = item.substr(0, eq);
        auto val = parse_rat(item.substr(eq + 1));
        if (!val || *val < 0) return std::nullopt;
        if (key == "var") cm.var = *val;
        else if (key == "app") cm.app = *val;
        else if (key == "cons") cm.cons = *val;
        else if (key == "let") cm.let_ = *val;
        else if (key == "letrec") cm.letrec = *val;
        else if (key == "match") cm.match = *val;
        else if (key == "prim") cm.prim = *val;
        else return std::nullopt;
    }
    return cm;
}

} // namespace lzc

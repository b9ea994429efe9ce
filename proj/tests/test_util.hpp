#pragma once

#include "lzc/infer.hpp"
#include "lzc/interp.hpp"
#include "lzc/parser.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace lzc::test {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline Module parse_corpus(const std::string& name) {
    return parse_module(read_file(std::string(CORPUS_DIR) + "/" + name));
}

inline std::vector<std::string> corpus_files() {
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(CORPUS_DIR))
        if (e.path().extension() == ".lzc") out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

// tail and head thunk costs of a solved list-like type
inline bool list_costs(const AnnPtr& t0, Rat* head, Rat* tail) {
    AnnPtr t = t0;
    while (t->kind == AnnType::Kind::Fun && t->is_artificial_arrow()) t = t->res;
    if (t->kind != AnnType::Kind::Mu) return false;
    for (const auto& c : t->ctors) {
        if (c.fields.size() == 2 && c.fields[1]->inner->kind == AnnType::Kind::TyVar) {
            if (c.fields[0]->ann.is_var() || c.fields[1]->ann.is_var()) return false;
            if (head) *head = c.fields[0]->ann.value;
            if (tail) *tail = c.fields[1]->ann.value;
            return true;
        }
    }
    return false;
}

} // namespace lzc::test

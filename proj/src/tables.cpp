#include "scamhunt/tables.hpp"

#include "scamhunt/errors.hpp"

#include <fstream>
#include <sstream>

namespace scamhunt::tables {

std::string load(std::string_view name, const std::optional<std::filesystem::path>& override_path) {
    if (override_path) {
        std::ifstream in(*override_path, std::ios::binary);
        if (!in) throw Error("cannot read table: " + override_path->string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    auto data = embedded(name);
    if (!data) throw Error("no embedded table named " + std::string(name));
    return std::string(*data);
}

}  // namespace scamhunt::tables

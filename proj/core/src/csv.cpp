#include "mpsim/csv.hpp"

#include <filesystem>
#include <fstream>

namespace mpsim::csv {

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    os << contents;
    if (!os) throw ConfigError("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace mpsim::csv

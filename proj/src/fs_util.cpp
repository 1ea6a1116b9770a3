#include "reid/fs_util.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "reid/error.hpp"

namespace reid {

void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) throw Error(Errc::io, "cannot write '" + tmp + "'");
    out << content;
    if (!out) throw Error(Errc::io, "write failure on '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::io, "rename to '" + path + "': " + ec.message());
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace reid

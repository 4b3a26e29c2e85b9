#pragma once
// CSV emission: every file starts with a header echoing the config hash, the
// seed, and the artifact version.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

#include "config.hpp"

namespace longjump {

class CsvFile {
 public:
  CsvFile() = default;  // disabled sink

  CsvFile(const std::string& dir, const std::string& name,
          const ExperimentConfig& cfg, const std::string& columns) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    path_ = dir + "/" + name;
    f_.open(path_);
    if (!f_) throw std::runtime_error("cannot open output file " + path_);
    f_ << "# config_hash=" << std::hex << cfg.hash() << std::dec
       << " seed=" << cfg.seed << " version=" << LONGJUMP_VERSION << "\n";
    f_ << columns << "\n";
    f_ << std::setprecision(12);
  }

  bool enabled() const { return f_.is_open(); }

  template <class... Ts>
  void row(const Ts&... vals) {
    if (!enabled()) return;
    bool first = true;
    ((f_ << (first ? "" : ","), first = false, f_ << vals), ...);
    f_ << "\n";
  }

  const std::string& path() const { return path_; }

 private:
  std::ofstream f_;
  std::string path_;
};

}  // namespace longjump

#include "cli/artifacts.hpp"

#include <fstream>
#include <system_error>

#include "daas/error.hpp"

namespace daas::cli {

void ArtifactSet::commit(const std::filesystem::path& dir) const {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
  }

  std::vector<fs::path> staged;
  std::vector<fs::path> published;
  auto rollback = [&] {
    std::error_code ignored;
    for (const auto& p : staged) {
      fs::remove(p, ignored);
    }
    for (const auto& p : published) {
      fs::remove(p, ignored);
    }
  };

  try {
    for (const auto& [name, contents] : files_) {
      auto tmp = dir / (name + ".tmp");
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      staged.push_back(tmp);
      if (!out) {
        throw Error("cannot open " + tmp.string() + " for writing");
      }
      out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
      out.close();
      if (!out) {
        throw Error("failed writing " + tmp.string());
      }
    }
    for (std::size_t i = 0; i < files_.size(); ++i) {
      const auto target = dir / files_[i].first;
      fs::rename(staged[i], target, ec);
      if (ec) {
        throw Error("cannot publish " + target.string() + ": " + ec.message());
      }
      published.push_back(target);
    }
  } catch (...) {
    rollback();
    throw;
  }
}

} // namespace daas::cli

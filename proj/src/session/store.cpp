#include "mapcolor/error.hpp"
#include "mapcolor/session.hpp"

#include <fstream>
#include <sstream>

namespace mapcolor {

namespace {

// Ids reach file names, so only the generated alphabet is accepted.
bool safe_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '-' || c == '_')) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::optional<std::string> MemorySessionStore::get(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = docs_.find(id);
  if (it == docs_.end()) return std::nullopt;
  return it->second;
}

void MemorySessionStore::put(const std::string& id, const std::string& document) {
  std::lock_guard lock(mu_);
  docs_[id] = document;
}

FileSessionStore::FileSessionStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::optional<std::string> FileSessionStore::get(const std::string& id) const {
  if (!safe_id(id)) return std::nullopt;
  std::ifstream in(dir_ / (id + ".json"), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void FileSessionStore::put(const std::string& id, const std::string& document) {
  if (!safe_id(id)) throw Error(Errc::BadRequest, "invalid session id");
  const auto target = dir_ / (id + ".json");
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Internal, "cannot write session file " + tmp.string());
    out << document;
    if (!out) throw Error(Errc::Internal, "cannot write session file " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace mapcolor

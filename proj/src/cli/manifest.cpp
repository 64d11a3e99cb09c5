#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "tilediv/cli.hpp"
#include "tilediv/error.hpp"

namespace tilediv::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::size_t worker_count() {
  if (const char* env = std::getenv(kWorkersEnv); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (*end != '\0' || value < 1) {
      throw Error(ErrorKind::kConfig, std::string(kWorkersEnv) + " must be a positive integer");
    }
    return static_cast<std::size_t>(value);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::kIo, "sha256 failed");
  }
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(digest[i]);
  return out.str();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return sha256_hex(buffer.str());
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error(ErrorKind::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorKind::kIo, "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

std::string encode_file_name(const std::string& id) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : id) {
    const bool keep = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                      c == '_' || c == '-' || (c == '.' && !out.empty());
    if (keep) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out.empty() ? "%" : out;
}

void Manifest::add_input(const std::string& role, const fs::path& path) {
  inputs_.push_back({{"role", role}, {"path", path.string()}, {"sha256", sha256_file(path)}});
}

void Manifest::set_parameter(const std::string& name, json value) {
  parameters_[name] = std::move(value);
}

void Manifest::add_output(const std::string& relative_path) { outputs_.push_back(relative_path); }

json Manifest::to_json() const {
  json out;
  out["command"] = command_;
  out["tool_version"] = kToolVersion;
  out["inputs"] = inputs_;
  out["parameters"] = parameters_;
  out["outputs"] = outputs_;
  return out;
}

void Manifest::write(const fs::path& out_dir) const {
  write_file_atomic(out_dir / "manifest.json", to_json().dump(2) + "\n");
}

}  // namespace tilediv::cli

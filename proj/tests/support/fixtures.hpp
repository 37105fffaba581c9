#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "fiper/document.hpp"
#include "fiper/store.hpp"

namespace fixture {

inline std::string path(const std::string& rel) { return std::string(FIPER_TEST_DATA) + "/" + rel; }
inline std::string text(const std::string& rel) { return fiper::read_file(path(rel)); }

inline fiper::DatasetSchema schema() { return fiper::parse_schema(text("german_credit.schema.json")); }

inline fiper::DatasetEntry german_credit() {
  return fiper::load_dataset(text("german_credit.schema.json"), text("german_credit.csv"));
}

inline fiper::ExplanationBundle bundle(const std::string& name) {
  return fiper::parse_bundle(text("bundles/" + name + ".json"), schema());
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

/// Runs a shell command, capturing stdout. stderr is left alone unless the
/// command redirects it.
inline RunResult run(const std::string& command) {
  RunResult r;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string cli() { return FIPER_CLI_PATH; }

inline std::string quoted(const std::string& s) { return "'" + s + "'"; }

}  // namespace fixture

#include "sweep/log.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace sweep {

namespace {
std::mutex sink_mutex;
WarningSink& sink() {
  static WarningSink s = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
  return s;
}
}  // namespace

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(sink_mutex);
  if (sink()) sink()(message);
}

WarningSink set_warning_sink(WarningSink s) {
  std::lock_guard<std::mutex> lock(sink_mutex);
  return std::exchange(sink(), std::move(s));
}

}  // namespace sweep

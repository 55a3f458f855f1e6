#include "tat/log.hpp"

#include <iostream>
#include <mutex>

namespace tat {

namespace {

std::mutex g_mutex;

WarningHandler& handler() {
  static WarningHandler h = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
  return h;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler h) {
  std::lock_guard<std::mutex> lock(g_mutex);
  WarningHandler old = std::move(handler());
  handler() = std::move(h);
  return old;
}

void warn(const std::string& msg) {
  std::lock_guard<std::mutex> lock(g_mutex);
  if (handler()) handler()(msg);
}

}  // namespace tat

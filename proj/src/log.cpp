#include "rimex/log.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace rimex {
namespace {

std::mutex sink_mutex;

WarningSink& sink() {
  static WarningSink s = [](std::string_view msg) {
    std::cerr << "rimex warning: " << msg << '\n';
  };
  return s;
}

}  // namespace

WarningSink set_warning_sink(WarningSink s) {
  std::lock_guard lock(sink_mutex);
  return std::exchange(sink(), std::move(s));
}

void log_warning(std::string_view message) {
  std::lock_guard lock(sink_mutex);
  if (sink()) sink()(message);
}

}  // namespace rimex

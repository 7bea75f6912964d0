// gecal command-line entry point.
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "gecal/cli.hpp"

namespace {

volatile std::sig_atomic_t g_interrupted = 0;

void on_signal(int) { g_interrupted = 1; }

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  // Servers cannot be stopped from inside a signal handler, so poll the flag.
  std::thread watcher([] {
    while (true) {
      if (g_interrupted) {
        if (!gecal::cli::stop_servers()) std::_Exit(130);
        g_interrupted = 0;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
  });
  watcher.detach();
  std::vector<std::string> args(argv + 1, argv + argc);
  return gecal::cli::run(args, std::cout, std::cerr);
}

// Copyright 2026 The iotsam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "iotsam/mock/mock_device.hpp"

int main(int argc, char** argv) {
  CLI::App app{"iotsam-mock-device: loopback fixture emulating an IoT device's network services"};
  std::string config_path;
  std::optional<std::string> ready_file;
  app.add_option("--config", config_path, "mock-device document")->required()->check(CLI::ExistingFile);
  app.add_option("--ready-file", ready_file, "Touch this file once every service is listening");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    std::ifstream in(config_path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    iotsam::mock::MockDevice device(iotsam::mock::parse_mock_config(buf.str()));
    const auto& config = device.config();
    for (const auto& s : config.services) {
      std::cout << "serving " << iotsam::model::to_token(s.protocol) << " on " << config.address << ":" << s.port
                << "\n";
    }
    std::cout << "ready\n" << std::flush;
    if (ready_file) std::ofstream(*ready_file) << "ready\n";
    int sig = 0;
    sigwait(&signals, &sig);
  } catch (const iotsam::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

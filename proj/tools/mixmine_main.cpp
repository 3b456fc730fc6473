/*
 * Copyright (c) 2026 the mixmine authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "mixmine/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "mixmine: privacy-preserving distributed association rule mining "
      "through a semi-trusted mixer"};

  mixmine::RunConfig cfg;
  std::string transport = "inproc";
  std::string role = "all";
  std::string scheme = "round_robin";
  mixmine::u64 modulus = 0;

  app.add_option("--dataset", cfg.dataset_path,
                 "transaction file, one whitespace-separated transaction per line")
      ->required();
  app.add_option("--sites", cfg.sites, "number of data sites (>= 3)")
      ->required();
  app.add_option("--minsup", cfg.minsup, "minimum support fraction")
      ->required();
  app.add_option("--minconf", cfg.minconf, "minimum confidence fraction")
      ->required();
  app.add_option("--seed", cfg.seed_hex,
                 "shared keystream seed, 20 hex digits; never printed")
      ->envname("MIXMINE_SEED")
      ->required();
  auto* mod_opt =
      app.add_option("--modulus", modulus,
                     "prime modulus rho (default: smallest prime above the "
                     "transaction count)");
  app.add_option("--bit-length", cfg.bit_length,
                 "residue width l in bits (default 16)");
  app.add_option("--transport", transport, "inproc or tcp")
      ->check(CLI::IsMember({"inproc", "tcp"}));
  app.add_option("--role", role, "tcp role: mixer, site, or all (loopback)")
      ->check(CLI::IsMember({"mixer", "site", "all"}));
  app.add_option("--site-index", cfg.site_index, "1-based index for --role site");
  app.add_option("--mixer-addr", cfg.mixer_addr, "HOST:PORT of the mixer");
  app.add_option("--report", cfg.report_path, "write the JSON report here");
  app.add_option("--partition", scheme, "round_robin or contiguous")
      ->check(CLI::IsMember({"round_robin", "contiguous"}));

  CLI11_PARSE(app, argc, argv);

  if (mod_opt->count() > 0) cfg.modulus = modulus;
  cfg.transport = transport == "tcp" ? mixmine::TransportKind::Tcp
                                     : mixmine::TransportKind::InProc;
  cfg.role = role == "mixer"  ? mixmine::Role::Mixer
             : role == "site" ? mixmine::Role::Site
                              : mixmine::Role::All;
  cfg.scheme = scheme == "contiguous" ? mixmine::PartitionScheme::Contiguous
                                      : mixmine::PartitionScheme::RoundRobin;

  return mixmine::run(cfg, std::cout, std::cerr);
}

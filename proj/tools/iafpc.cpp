// SPDX-License-Identifier: Apache-2.0
//
// iafpc: uplink interference-aware fractional power control for two-tier
// Poisson cellular networks, analysis and simulation.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Command-line front end: validate configurations, run figure recipes, list recipes.

#include "iafpc/iafpc.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#ifndef IAFPC_RECIPE_DIR
#define IAFPC_RECIPE_DIR "recipes"
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

std::vector<std::filesystem::path> recipe_files(std::string const &dir)
{
    std::vector<std::filesystem::path> out;
    if (!std::filesystem::is_directory(dir))
        return out;
    for (auto const &e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".recipe")
            out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

/// Resolves a recipe argument given either as a path or as a bare name in the recipe directory.
std::string resolve_recipe(std::string const &arg, std::string const &dir)
{
    if (std::filesystem::exists(arg))
        return arg;
    const auto candidate = std::filesystem::path(dir) / (arg + ".recipe");
    if (std::filesystem::exists(candidate))
        return candidate.string();
    throw iafpc::ConfigError("recipe '" + arg + "' not found (looked for a file and in '" + dir + "')");
}

template <class F>
int guarded(F &&f)
{
    try
    {
        return f();
    }
    catch (iafpc::ConfigError const &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (std::invalid_argument const &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (iafpc::NumericError const &e)
    {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    catch (std::exception const &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Uplink interference-aware fractional power control in two-tier cellular networks"};
    app.require_subcommand(1);
    std::string recipe_dir = IAFPC_RECIPE_DIR;
    app.add_option("--recipe-dir", recipe_dir, "Directory searched for *.recipe files");

    auto *validate = app.add_subcommand("validate", "Parse a configuration and echo resolved and derived parameters");
    std::string validate_path;
    validate->add_option("config", validate_path, "Configuration file")->required();

    auto *run = app.add_subcommand("run", "Run a recipe and write one CSV per output metric");
    std::string spec_arg, config_path, out_dir = "out";
    std::uint64_t seed = 1;
    std::optional<std::size_t> realizations;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    run->add_option("spec", spec_arg, "Recipe file or recipe name")->required();
    run->add_option("--config", config_path, "Configuration file (Table I defaults when omitted)");
    run->add_option("--seed", seed, "Master seed of the simulation pipelines");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--realizations", realizations, "Override the recipe realization count")->check(CLI::PositiveNumber);
    run->add_option("--threads", threads, "Grid points evaluated concurrently")->check(CLI::PositiveNumber);

    auto *list = app.add_subcommand("list-recipes", "List the shipped recipes");

    CLI11_PARSE(app, argc, argv);

    if (*validate)
        return guarded([&] {
            std::cout << iafpc::validate_config(iafpc::load_config(validate_path));
            return kExitOk;
        });

    if (*run)
        return guarded([&] {
            const auto spec = iafpc::load_experiment(resolve_recipe(spec_arg, recipe_dir));
            const auto cfg = config_path.empty() ? iafpc::ScenarioConfig{} : iafpc::load_config(config_path);
            iafpc::RunOptions opt;
            opt.seed = seed;
            opt.realizations = realizations;
            opt.threads = threads;
            for (auto const &p : iafpc::run_experiment(spec, cfg, out_dir, opt))
                std::cout << p << '\n';
            return kExitOk;
        });

    if (*list)
        return guarded([&] {
            for (auto const &p : recipe_files(recipe_dir))
            {
                const auto spec = iafpc::load_experiment(p.string());
                std::cout << spec.name << '\t' << spec.description << '\n';
            }
            return kExitOk;
        });
    return kExitOk;
}

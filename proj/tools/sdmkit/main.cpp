#include "common.hpp"

#include "sdm/signal/dataset_io.hpp"

#include <filesystem>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"sdmkit: dynamic-mode features and decoding for multichannel trials"};
  app.require_subcommand(1);
  sdmkit::add_synth_command(app);
  sdmkit::add_featurize_command(app);
  sdmkit::add_decode_command(app);
  sdmkit::add_analyze_command(app);
  sdmkit::add_bench_command(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return sdmkit::kUsage;
  } catch (const sdmkit::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return sdmkit::kUsage;
  } catch (const sdm::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return sdmkit::kDataError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return sdmkit::kDataError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return sdmkit::kDataError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return sdmkit::kInternal;
  }
  return sdmkit::kOk;
}

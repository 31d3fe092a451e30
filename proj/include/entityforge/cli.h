// Copyright 2026 The EntityForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef ENTITYFORGE_CLI_H_
#define ENTITYFORGE_CLI_H_

namespace entityforge {

// Subcommands: run, compare, synth, score, exponent-series, validate.
// Returns the process exit code (0 ok, 2 usage/config, 3 data/io).
int RunCli(int argc, char** argv);

}  // namespace entityforge

#endif  // ENTITYFORGE_CLI_H_

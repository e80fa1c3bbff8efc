/*
 * Copyright 2026 The mutafuzz Authors
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

/* Support library linked into generated fuzzing drivers.
 *
 * The input file is loaded once, zero-extended to mutafuzz_required_size
 * (defined by the driver), and consumed front to back by get_value.
 * Log lines go to $MUTAFUZZ_LOG_FILE, or stderr when unset.
 */
#ifndef MUTAFUZZ_RT_H_
#define MUTAFUZZ_RT_H_

#ifdef __cplusplus
extern "C" {
#endif

#define MUTAFUZZ_EXIT_UNREADABLE 66

extern unsigned long mutafuzz_required_size;

/* Exits with MUTAFUZZ_EXIT_UNREADABLE when the file cannot be read. */
int load_file(const char* path);
/* `reserved` must be 0. */
void get_value(void* dst, unsigned long size, int reserved);
void seek_data_index(unsigned long pos);
/* 0 when the bytes are equal, 1 otherwise. */
int compare_value(const void* a, const void* b, unsigned long size);
/* Flushes the log, then raises SIGABRT. */
void safe_abort(void);
void mutafuzz_log(const char* msg);
/* Appends "<name> <hex bytes>" to $MUTAFUZZ_DUMP_FILE. */
void dump_value(const char* name, const void* value, unsigned long size);

#ifndef MUTAFUZZ_NO_LOG_MACRO
#define log mutafuzz_log
#endif

#ifdef __cplusplus
}
#endif

#endif /* MUTAFUZZ_RT_H_ */

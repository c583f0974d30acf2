/* Build: cargo build -p baseparam-ffi --release
 *        cc examples/analyze.c -Iinclude -L../../target/release -l:libbaseparam_ffi.a -lm -lpthread -ldl
 */
#include <stdio.h>
#include <stdlib.h>

#include "baseparam.h"

int main(int argc, char **argv) {
    const char *name = argc > 1 ? argv[1] : "puma560";
    BpModel *model = NULL;
    if (bp_model_bundled(name, &model) != BP_STATUS_OK &&
        bp_model_load(name, &model) != BP_STATUS_OK) {
        fprintf(stderr, "load failed: %s\n", bp_last_error());
        return 2;
    }
    BpAnalysis *analysis = NULL;
    if (bp_analyze(model, &analysis) != BP_STATUS_OK) {
        fprintf(stderr, "analysis failed: %s\n", bp_last_error());
        bp_model_free(model);
        return 2;
    }
    printf("d = %zu, base = %zu\n", bp_analysis_nullspace_dim(analysis),
           bp_analysis_base_count(analysis));

    int pass = 0;
    char *report = NULL;
    BpStatus status = bp_validate(model, 100, 0, 0.0, 0.0, &pass, &report);
    if (status != BP_STATUS_OK) {
        fprintf(stderr, "validation failed: %s\n", bp_last_error());
    } else {
        printf("%s\n%s\n", report, pass ? "PASS" : "FAIL");
        bp_string_free(report);
    }
    bp_analysis_free(analysis);
    bp_model_free(model);
    return status == BP_STATUS_OK && pass ? 0 : 1;
}

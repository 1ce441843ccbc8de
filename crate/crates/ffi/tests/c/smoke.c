#include <stdio.h>
#include <string.h>

#include "wiretrack.h"

int main(int argc, char **argv) {
    if (argc != 2) {
        fprintf(stderr, "usage: smoke <scenario>\n");
        return 2;
    }
    WtScenario *scenario = NULL;
    if (wt_scenario_load(argv[1], &scenario) != WT_STATUS_OK) {
        fprintf(stderr, "load: %s\n", wt_last_error_message());
        return 1;
    }
    WtRun *run = NULL;
    if (wt_run(scenario, &run) != WT_STATUS_OK) {
        fprintf(stderr, "run: %s\n", wt_last_error_message());
        wt_scenario_free(scenario);
        return 1;
    }
    WtReport report;
    wt_run_report(run, &report);

    size_t moves = 0;
    WtTraceRow row;
    for (size_t i = 0; i < wt_run_trace_len(run); i++) {
        wt_run_trace_row(run, i, &row);
        if (row.event == WT_EVENT_MOVE_END)
            moves++;
    }
    int bad = wt_run_trace_row(run, wt_run_trace_len(run), &row) != WT_STATUS_INDEX;

    printf("trials=%zu moves=%zu distance=%.3f\n", report.trials, moves, report.distance_m);
    wt_run_free(run);
    wt_scenario_free(scenario);
    return bad;
}

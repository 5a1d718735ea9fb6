/* Tiny round-robin task scheduler. */
#include <stdlib.h>
#include <string.h>

#define MAX_TASKS 16

typedef void (*task_fn)(void *);

struct task {
    task_fn fn;
    void *arg;
    int live;
};

static struct task tasks[MAX_TASKS];
static int task_count = 0;

static void *xmalloc(size_t n) {
    void *p = malloc(n);
    if(p == NULL) {
        abort();
    }
    return memset(p, 0, n);
}

char *copy_name(const char *name) {
    size_t n = strlen(name) + 1;
    char *out = xmalloc(n);
    return strcpy(out, name);
}

int spawn(task_fn fn, void *arg) {
    if(task_count >= MAX_TASKS) {
        return -1;
    }
    tasks[task_count].fn = fn;
    tasks[task_count].arg = arg;
    tasks[task_count].live = 1;
    return task_count++;
}

void run_all(void) {
    int i = 0;
    while(i < task_count) {
        if(tasks[i].live) {
            tasks[i].fn(tasks[i].arg);
        }
        i++;
    }
}

int main(void) {
    char *name = copy_name("worker");
    spawn((task_fn)free, name);
    run_all();
    free(name);
    return 0;
}

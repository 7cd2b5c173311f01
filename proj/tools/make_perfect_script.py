#!/usr/bin/env python3
"""Generate the scripted-backend file that solves every bundled task.

One file serves all three worker methods: ReActEval reads reason/act/evaluate,
ReAct reads reason_with_end_flag/act, Act reads act_direct. Head threads
(plan, respond) are shared.

    python3 tools/make_perfect_script.py > data/perfect_script.jsonl
"""

import argparse
import json
import sys


def call(tool, **params):
    return {"function_call": tool, "parameters": params}


def move(direction, distance):
    return call("move", direction=direction, distance=distance)


def rotate(angle):
    return call("rotate", angle=angle)


TAKEOFF = call("takeoff")
LAND = call("land")
CAPTURE = call("capture_image")
ANALYZE = call("analyze_image")
GAUGES = call("analyze_gauges")

SQUARE = [move("forward", 3), move("right", 3), move("backward", 3), move("left", 3)]
CORNERS = [TAKEOFF, rotate(270), move("forward", 4.5), CAPTURE, rotate(180), move("forward", 9), CAPTURE]

# task id -> (per-drone action lists, response). An empty mapping is an
# informational request answered by the head agent alone.
SOLUTIONS = {
    "easy-1": ({}, "I plan tasks for the drone fleet, dispatch a worker agent to each drone, "
                   "and report the results back to you."),
    "easy-2": ({1: [TAKEOFF], 2: [TAKEOFF]}, "Both drones have taken off and are hovering at 1 m."),
    "easy-3": ({1: [TAKEOFF, move("forward", 2)]}, "Drone 1 took off and moved forward 2 m."),
    "easy-4": ({2: [CAPTURE]}, "Drone 2 captured an image."),
    "easy-5": ({2: [ANALYZE]}, "Drone 2 analyzed its current view."),
    "easy-6": ({1: [TAKEOFF, LAND], 2: [TAKEOFF, LAND]}, "Both drones took off and landed safely."),
    "easy-7": ({}, "Both drones are landed at their start positions, drone 1 at (0, 0, 0) and drone 2 at (0, 2, 0)."),
    "easy-8": ({1: [TAKEOFF, rotate(180)], 2: [TAKEOFF, rotate(180)]}, "Both drones took off and rotated 180 degrees."),
    "medium-1": ({1: SQUARE, 2: SQUARE}, "Both drones flew a 3 m square and returned to their start points."),
    "medium-2": ({2: [TAKEOFF, rotate(180), CAPTURE, LAND]}, "Drone 2 turned around, took a picture and landed."),
    "medium-3": ({1: [TAKEOFF, move("forward", 4), CAPTURE, ANALYZE]},
                 "Drone 1 flew forward 4 m and photographed a pressure gauge on a red pipe."),
    "medium-4": ({1: [TAKEOFF, move("right", 5), move("up", 5), rotate(180), LAND],
                  2: [TAKEOFF, move("left", 5), move("up", 2), rotate(90), LAND]},
                 "Both drones completed their moves, rotated and landed."),
    "medium-5": ({1: [move("left", 5), rotate(120), move("left", 5), rotate(120), move("left", 5)],
                  2: [move("right", 5), rotate(-120), move("right", 5), rotate(-120), move("right", 5)]},
                 "Both drones flew a 5 m triangle and are back at their start points."),
    "hard-1": ({1: CORNERS, 2: CORNERS}, "All four corners of the room were imaged, two by each drone."),
    "hard-2": ({2: [TAKEOFF, move("up", 5), move("forward", 15.5), move("right", 4), CAPTURE, GAUGES]},
               "Drone 2 reached the pressure gauge; it reads approximately 120 psi."),
    "hard-3": ({1: [TAKEOFF, move("up", 4), move("forward", 4), rotate(90), CAPTURE, ANALYZE],
                2: [TAKEOFF, move("up", 4), move("forward", 2), move("right", 6), rotate(270), CAPTURE, ANALYZE]},
               "Both drones described the object: a grey junction box with a yellow warning label."),
}


def describe(c):
    params = ", ".join(f"{k}={v}" for k, v in c["parameters"].items())
    return f"{c['function_call']}({params})"


def entries(label, actions, response):
    head = f"{label}/head"
    plan = {}
    for drone, calls in sorted(actions.items()):
        steps = "; ".join(describe(c) for c in calls)
        plan[str(drone)] = {"plan": steps, "expected_outcome": f"Drone {drone} has executed: {steps}", "end_flag": False}
    if not plan:
        plan["1"] = {"plan": "No drone action needed.", "expected_outcome": "Request answered.", "end_flag": True}
    plan["response_to_user"] = "Dispatching the drones." if actions else response
    yield head, "plan", 1, plan
    yield head, "respond", 1, {"response": response}

    for drone, calls in sorted(actions.items()):
        thread = f"{label}/drone-{drone}"
        n = len(calls)
        for i, c in enumerate(calls, start=1):
            intent = describe(c)
            yield thread, "reason", i, {"reasoning": f"Step {i} of {n} in the plan is {intent}.", "intended_action": intent}
            yield thread, "act", i, c
            done = i == n
            yield thread, "evaluate", i, {
                "evaluation_summary": f"{intent} executed." + (" The plan is complete." if done else ""),
                "end_flag": done,
                "next_steps_notes": "None." if done else f"Next: {describe(calls[i])}.",
            }
            yield thread, "reason_with_end_flag", i, {
                "reasoning": f"Step {i} of {n} in the plan is {intent}.", "intended_action": intent, "end_flag": False}
            yield thread, "act_direct", i, c
        yield thread, "reason_with_end_flag", n + 1, {
            "reasoning": "Every step of the plan has been executed.", "intended_action": "none", "end_flag": True}
        yield thread, "act_direct", n + 1, call("terminate")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--tasks", help="comma-separated task ids (default: all)")
    args = parser.parse_args()
    ids = args.tasks.split(",") if args.tasks else list(SOLUTIONS)
    for task in ids:
        actions, response = SOLUTIONS[task]
        for thread, template, ordinal, output in entries(task, actions, response):
            record = {"thread": thread, "template": template, "ordinal": ordinal, "output": output}
            sys.stdout.write(json.dumps(record) + "\n")


if __name__ == "__main__":
    main()

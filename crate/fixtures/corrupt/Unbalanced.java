package com.example.broken;

// One closing brace short: the class body never ends.
public class Unbalanced {
    void run(boolean ready) {
        if (ready) {
            System.out.println("ready");
        }
    }

package com.example.tracker;

import android.app.Activity;
import android.content.SharedPreferences;
import android.os.Bundle;
import android.view.View;
import android.widget.CheckBox;

public class SettingsActivity extends Activity {
    private SharedPreferences prefs;

    @Override
    protected void onCreate(Bundle savedInstanceState) {
        super.onCreate(savedInstanceState);
        setContentView(R.layout.settings);
        prefs = getSharedPreferences("settings", MODE_PRIVATE);
        CheckBox metric = (CheckBox) findViewById(R.id.settings_metric);
        metric.setChecked(prefs.getBoolean("metric", true));
        View.OnClickListener save = new View.OnClickListener() {
            @Override
            public void onClick(View v) {
                prefs.edit().putBoolean("metric", ((CheckBox) v).isChecked()).apply();
            }
        };
        metric.setOnClickListener(save);
    }
}
